"""Pattern/count algebra over products of powers of linear forms.

Fragments, slices, the covering and refinement orders and the weighted
AM-GM inequality used to reason about them.
"""
import logging
from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.special import rel_entr

from models.algebra_models import OrderOneFragment, ProductOfFragments, RefinementVerdict
from services.config import CO_THICKNESS_RTOL
from services.error_handler import DegenerateUnionError, SizeCapError, ValidationError

logger = logging.getLogger(__name__)

MAX_REFINEMENT_FRAGMENTS = 16


def is_fragment(prod: ProductOfFragments) -> bool:
    return bool(np.all(prod.pattern_sum() <= 1))


def is_slice(prod: ProductOfFragments) -> bool:
    return bool(np.all(prod.pattern_sum() == 1))


def union_fragments(i1: OrderOneFragment, i2: OrderOneFragment) -> OrderOneFragment:
    if i1.n != i2.n:
        raise ValidationError("fragments must share the same number of ions")
    count = i1.count + i2.count
    if count == 0:
        raise DegenerateUnionError(f"union of {i1.bits} and {i2.bits} has zero count")
    pattern = tuple(max(u, v) for u, v in zip(i1.pattern, i2.pattern))
    return OrderOneFragment(pattern=pattern, count=count)


def covers(i1: OrderOneFragment, i2: OrderOneFragment) -> bool:
    """True when i2 covers i1, i.e. δ₂ ≥ δ₁ componentwise."""
    if i1.n != i2.n:
        raise ValidationError("fragments must share the same number of ions")
    return i1.mask & ~i2.mask == 0


def covers_product(omega: ProductOfFragments, xi: ProductOfFragments) -> bool:
    """True when every fragment of omega has a distinct covering fragment in xi."""
    if omega.n != xi.n:
        raise ValidationError("products must share the same number of ions")
    if omega.order != xi.order:
        return False
    if omega.order == 0:
        return True

    cover = np.array([[covers(inner, outer) for outer in xi.fragments] for inner in omega.fragments], dtype=float)
    # for every omega fragment, the xi fragment matched to it or -1
    matching = maximum_bipartite_matching(csr_matrix(cover), perm_type="column")
    return bool(np.all(matching >= 0))


def collects_with(p1: ProductOfFragments, p2: ProductOfFragments) -> bool:
    if p1.n != p2.n:
        raise ValidationError("products must share the same number of ions")
    return p1.pattern_set() == p2.pattern_set()


def _refinement_search(xi: ProductOfFragments, omega: ProductOfFragments, exact: bool) -> bool:
    """Backtracking over disjoint index sets I_j of xi, one per fragment of omega.

    With ``exact`` the sets must partition xi and every count condition is
    an equality (a split); otherwise Σσ ≥ ρ_j on disjoint sets suffices.
    """
    masks = [f.mask for f in xi.fragments]
    sigmas = [f.count for f in xi.fragments]
    targets = [(f.mask, f.count) for f in omega.fragments]
    scale = max([1.0] + [abs(c) for c in sigmas] + [abs(c) for _, c in targets])
    tol = 1e-12 * scale
    everything = (1 << len(masks)) - 1

    def assign(j: int, used: int) -> bool:
        if j == len(targets):
            return used == everything if exact else True
        target, rho = targets[j]
        candidates = [i for i in range(len(masks)) if not used >> i & 1 and masks[i] & ~target == 0]

        def choose(k: int, covered: int, total: float, chosen: int) -> bool:
            if covered == target:
                ok = abs(total - rho) <= tol if exact else total >= rho - tol
                return ok and assign(j + 1, used | chosen)
            if k == len(candidates):
                return False
            i = candidates[k]
            if masks[i] & covered == 0 and choose(k + 1, covered | masks[i], total + sigmas[i], chosen | 1 << i):
                return True
            return choose(k + 1, covered, total, chosen)

        return choose(0, 0, 0.0, 0)

    return assign(0, 0)


def refines(xi: ProductOfFragments, omega: ProductOfFragments) -> RefinementVerdict:
    if xi.n != omega.n:
        raise ValidationError("products must share the same number of ions")
    if max(xi.order, omega.order) > MAX_REFINEMENT_FRAGMENTS:
        raise SizeCapError(
            f"refinement search is capped at {MAX_REFINEMENT_FRAGMENTS} fragments per product"
        )
    if _refinement_search(xi, omega, exact=True):
        return "splits"
    if _refinement_search(xi, omega, exact=False):
        return "refines"
    return "no"


# ----------------------------------------------------------------------
# Weighted AM-GM
# ----------------------------------------------------------------------
def _positive_vector(values, name: str) -> np.ndarray:
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0 or np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise ValidationError(f"{name} must be a non-empty vector of positive reals")
    return values


def weighted_amgm_gap(x, a, relative: bool = False) -> float:
    """RHS - LHS of  Π x_i^{a_i} ≤ (Π a_i^{a_i} / A^A) (Σx)^A  with A = Σa.

    With ``relative`` the gap is divided by the right-hand side, which keeps
    it finite for large exponents.
    """
    x = _positive_vector(x, "x")
    a = _positive_vector(a, "a")
    if x.size != a.size:
        raise ValidationError("x and a must have the same length")

    ratio = x.sum() / a.sum()
    log_gap = float(np.sum(a * np.log(ratio * a / x)))
    fraction = -np.expm1(-max(log_gap, 0.0))
    if relative:
        return float(fraction)
    log_rhs = float(np.sum(a * np.log(a)) - a.sum() * np.log(a.sum()) + a.sum() * np.log(x.sum()))
    return float(np.exp(log_rhs) * fraction)


def masked_amgm_gap(x, delta, beta, relative: bool = False) -> float:
    """(δᵀx)^b - (b^b / Π β_i^{β_i}) Π x_i^{β_i}  with b = Σβ and 0⁰ := 1."""
    x = _positive_vector(x, "x")
    delta = np.asarray(delta, dtype=int).ravel()
    beta = np.asarray(beta, dtype=float).ravel()
    if not (x.size == delta.size == beta.size):
        raise ValidationError("x, delta and beta must have the same length")
    if np.any(beta < 0) or np.any((delta == 0) & (beta != 0)):
        raise ValidationError("beta must be non-negative and vanish outside the pattern")
    b = beta.sum()
    if b <= 0:
        raise ValidationError("beta must have a positive total")

    mass = float(delta @ x)
    active = beta > 0
    log_gap = float(np.sum(beta[active] * np.log((mass / b) * beta[active] / x[active])))
    fraction = -np.expm1(-max(log_gap, 0.0))
    if relative:
        return float(fraction)
    return float(np.exp(b * np.log(mass)) * fraction)


def entropy_gap(x, a) -> float:
    """Σ a ln a - Σ a ln x for simplicial x and a (both renormalized); ≥ 0."""
    x = _positive_vector(x, "x")
    a = np.asarray(a, dtype=float).ravel()
    if a.size != x.size or np.any(a < 0) or a.sum() <= 0:
        raise ValidationError("a must be a non-negative vector of the same length as x")
    return float(np.sum(rel_entr(a / a.sum(), x / x.sum())))


# ----------------------------------------------------------------------
# Thickness of products
# ----------------------------------------------------------------------
def fragment_thickness(fragment: OrderOneFragment, y) -> float:
    mass = float(np.asarray(fragment.pattern, dtype=float) @ np.asarray(y, dtype=float))
    if mass == 0:
        raise ValidationError(f"pattern {fragment.bits} has zero mass at the given point")
    return fragment.count / mass


def co_thickness(slice_prod: ProductOfFragments, y, rtol: float = CO_THICKNESS_RTOL) -> Optional[float]:
    """The thickness shared by every term of the slice at y, or None."""
    if not is_slice(slice_prod):
        raise ValidationError("co-thickness is defined for slices only")
    values = [fragment_thickness(f, y) for f in slice_prod.fragments]
    first = values[0]
    if all(abs(v - first) <= rtol * max(abs(v), abs(first)) for v in values):
        return first
    return None


def total_thickness(slices: Sequence[ProductOfFragments], y) -> Optional[float]:
    values = [co_thickness(s, y) for s in slices]
    if any(v is None for v in values):
        return None
    return float(sum(values))


def superposed_thickness(prod: ProductOfFragments, y) -> np.ndarray:
    """Per ion, the summed thickness of every term containing it."""
    result = np.zeros(prod.n)
    for fragment in prod.fragments:
        result += np.asarray(fragment.pattern, dtype=float) * fragment_thickness(fragment, y)
    return result


def multiply(products: Iterable[ProductOfFragments]) -> ProductOfFragments:
    products: List[ProductOfFragments] = list(products)
    if not products:
        raise ValidationError("nothing to multiply")
    n = products[0].n
    if any(p.n != n for p in products):
        raise ValidationError("products must share the same number of ions")
    return ProductOfFragments(n=n, fragments=tuple(f for p in products for f in p.fragments))
