import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from models.algebra_models import CoveringGraph, RegularityVerdict, pattern_bits, pattern_mask
from models.count_models import CountModel, Pattern
from services import config
from services.core import log_likelihood
from services.decorators import log_performance
from services.error_handler import SizeCapError, ValidationError
from services.task_queue import background_queue

logger = logging.getLogger(__name__)

UNION_CHUNK = 1 << 14
MAX_MASK_IONS = 62


def _collected_terms(model: CountModel) -> Tuple[List[Pattern], np.ndarray, np.ndarray]:
    terms = list(model.kernel_terms())
    patterns = [pattern for pattern, _ in terms]
    masks = np.asarray([pattern_mask(p) for p in patterns], dtype=np.int64)
    counts = np.asarray([count for _, count in terms], dtype=float)
    return patterns, masks, counts


def _mask_pattern(mask: int, n: int) -> Pattern:
    return tuple((int(mask) >> i) & 1 for i in range(n))


def _scan_unions(unions: np.ndarray, masks: np.ndarray, counts: np.ndarray, tol: float):
    """Covered-count sums for a block of unions; returns (min sum, its union, violations)."""
    covered = (masks[None, :] & ~unions[:, None]) == 0
    sums = covered.astype(float) @ counts
    k = int(np.argmin(sums))
    return float(sums[k]), int(unions[k]), int(np.count_nonzero(sums < -tol))


@log_performance
def check_uniform_regularity(model: CountModel, cap: Optional[int] = None) -> RegularityVerdict:
    """Every non-exhaustive union of negative terms must cover a non-negative total count."""
    cap = config.max_regularity_terms() if cap is None else cap
    if model.n > MAX_MASK_IONS:
        raise SizeCapError(f"regularity check supports at most {MAX_MASK_IONS} ions")

    _, masks, counts = _collected_terms(model)
    negative = np.flatnonzero(counts < 0)
    if len(negative) > cap:
        logger.warning(f"Regularity check skipped: {len(negative)} negative terms exceed cap {cap}")
        return RegularityVerdict(status="size_cap", negative_terms=len(negative))
    if len(negative) == 0:
        return RegularityVerdict(status="regular", negative_terms=0)

    unions = np.zeros(1, dtype=np.int64)
    for mask in masks[negative]:
        unions = np.concatenate([unions, unions | mask])
    full = (1 << model.n) - 1
    unions = np.unique(unions[1:])
    unions = unions[unions != full]
    if unions.size == 0:
        return RegularityVerdict(status="regular", negative_terms=len(negative))

    tol = 1e-12 * float(np.abs(counts).sum())
    blocks = [unions[start:start + UNION_CHUNK] for start in range(0, unions.size, UNION_CHUNK)]
    if len(blocks) == 1:
        results = [_scan_unions(blocks[0], masks, counts, tol)]
    else:
        outcomes = background_queue.map(lambda block: _scan_unions(block, masks, counts, tol), blocks)
        failed = [o["error"] for o in outcomes if o["status"] != "completed"]
        if failed:
            raise failed[0]
        results = [o["result"] for o in outcomes]

    violations = sum(r[2] for r in results)
    worst_sum, worst_union, _ = min(results, key=lambda r: (r[0], r[1]))
    if violations == 0:
        return RegularityVerdict(status="regular", negative_terms=len(negative), unions_checked=int(unions.size))

    under = negative[(masks[negative] & ~np.int64(worst_union)) == 0]
    witness = _mask_pattern(worst_union, model.n)
    logger.info(f"Irregular: union {pattern_bits(witness)} covers a total count of {worst_sum}")
    return RegularityVerdict(
        status="irregular",
        negative_terms=len(negative),
        unions_checked=int(unions.size),
        witness=witness,
        witness_count=float(counts[under].sum()),
        covered_sum=worst_sum,
        violations=violations,
    )


def covering_graph(model: CountModel) -> CoveringGraph:
    """DAG of collected patterns with arrows for immediate covers only."""
    patterns, _, counts = _collected_terms(model)
    bits = np.asarray(patterns, dtype=bool)

    # below[k, m]: pattern m strictly dominates pattern k
    below = np.all(bits[:, None, :] <= bits[None, :, :], axis=2)
    below[np.diag_indices_from(below)] = False
    between = (below.astype(int) @ below.astype(int)) > 0
    immediate = below & ~between
    edges = [(patterns[k], patterns[m]) for k, m in np.argwhere(immediate)]
    return CoveringGraph(
        nodes=tuple((p, float(c)) for p, c in zip(patterns, counts)),
        edges=tuple(edges),
    )


def boundary_probe(
    model: CountModel,
    face: Pattern,
    distances: Sequence[float] = (1e-4, 1e-6, 1e-8),
) -> np.ndarray:
    """Log-kernel values at points whose ``face`` coordinates share total mass t."""
    face = np.asarray(face, dtype=bool)
    if face.size != model.n or not face.any() or face.all():
        raise ValidationError("probe face must be a non-empty, non-exhaustive pattern")

    values = []
    for t in distances:
        x = np.where(face, t / face.sum(), (1.0 - t) / (~face).sum())
        values.append(log_likelihood(model, x))
    return np.asarray(values)
