"""Grid files: a header row of ionic counts, then one row per pattern.

    a_1,a_2,...,a_n
    δ_1j,...,δ_nj,b_j

Tab-separated when the header holds a tab, comma-separated otherwise.
Blank lines and lines starting with ``#`` are skipped.
"""
import io
import logging

import numpy as np
import pandas as pd

from models.count_models import CountModel
from services.core import canonicalize
from services.error_handler import ValidationError
from services.formatting import format_count

logger = logging.getLogger(__name__)


def parse_grid(text: str) -> CountModel:
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise ValidationError("grid file is empty")

    delimiter = "\t" if "\t" in lines[0] else ","
    n = len(lines[0].split(delimiter))
    widths = {len(line.split(delimiter)) for line in lines[1:]}
    if widths - {n + 1}:
        raise ValidationError(f"ragged grid: every pattern row needs {n} bits and a count")
    try:
        frame = pd.read_csv(
            io.StringIO("\n".join(lines)),
            sep=delimiter,
            header=None,
            names=list(range(n + 1)),
            index_col=False,
            dtype=str,
            skipinitialspace=True,
        )
    except pd.errors.ParserError as e:
        raise ValidationError(f"ragged grid: {e}")

    header = pd.to_numeric(frame.iloc[0, :n], errors="coerce")
    if header.isna().any() or pd.notna(frame.iloc[0, n]):
        raise ValidationError("grid header must hold exactly n numeric ionic counts")

    body = frame.iloc[1:]
    if body.isna().any().any():
        raise ValidationError("every grid row needs n bits and a count")
    bits = body.iloc[:, :n].replace(r"\s+", "", regex=True)
    if not bits.isin(["0", "1"]).all().all():
        raise ValidationError("grid pattern entries must be 0 or 1")
    counts = pd.to_numeric(body.iloc[:, n], errors="coerce")
    if counts.isna().any():
        raise ValidationError("grid counts must be numeric")
    if (counts == 0).any():
        raise ValidationError("grid rows must have non-zero counts")

    a = header.to_numpy(dtype=float)
    terms = [(tuple(int(i == k) for i in range(n)), a[k]) for k in range(n) if a[k] != 0]
    terms += list(zip(map(tuple, bits.astype(int).to_numpy()), counts.to_numpy(dtype=float)))
    if not terms:
        raise ValidationError("grid has no non-zero counts")

    model = canonicalize(terms)
    logger.info(f"Read grid with n={model.n}, q={model.q}")
    return model


def write_grid(model: CountModel, delimiter: str = ",") -> str:
    rows = [delimiter.join(format_count(v) for v in model.a)]
    for j in range(model.q):
        rows.append(delimiter.join([*map(str, model.pattern(j)), format_count(model.b[j])]))
    return "\n".join(rows) + "\n"
