"""Standard-out renderers: deterministic JSON, CSV and the play-board table."""
import io
import json
from typing import Any, Dict

import numpy as np
import pandas as pd

from models.count_models import CountModel
from models.solver_models import Solution
from services.formatting import format_number


def to_json(value: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    close = " " * (indent * _level)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        if len(value) == 0:
            return "[]"
        return "[" + ", ".join(to_json(v, indent, _level + 1) for v in value) + "]"
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_number(value)
    return json.dumps(str(value))


def to_csv(document: Dict[str, Any], model: CountModel) -> str:
    rows = [("p", name, value) for name, value in zip(model.ions, document["p"])]
    rows.append(("tau0", "", document["tau0"]))
    rows += [("tau", _pattern_label(model, j), value) for j, value in enumerate(document["tau"])]
    rows.append(("sse", "", document["sse"]))
    frame = pd.DataFrame(rows, columns=["quantity", "term", "value"])
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format="%.17g", lineterminator="\n")
    return buffer.getvalue()


def _pattern_label(model: CountModel, j: int) -> str:
    return "+".join(name for name, bit in zip(model.ions, model.pattern(j)) if bit)


def play_board(model: CountModel, solution: Solution) -> pd.DataFrame:
    """Slice contributions τ·p_i of every term, with the term's own count and thickness.

    A pattern row fills the ions outside the pattern. Column sums over the
    term rows give the reconstruction R, shown above the ionic counts a.
    """
    p = solution.p.values
    tau0 = solution.thickness.tau0
    tau = solution.thickness.tau_vec

    rows = {"ionic": [*(tau0 * p), tau0, tau0]}
    for j in range(model.q):
        pattern = np.asarray(model.pattern(j), dtype=bool)
        cells = np.where(pattern, np.nan, tau[j] * p)
        rows[_pattern_label(model, j)] = [*cells, model.b[j], tau[j]]
    terms = np.asarray(list(rows.values()))[:, : model.n]
    reconstruction = np.nansum(terms, axis=0)
    rows["R"] = [*reconstruction, float(reconstruction.sum()), np.nan]
    rows["a"] = [*model.a_vec, float(model.a_vec.sum()), np.nan]
    rows["p"] = [*p, float(p.sum()), np.nan]
    return pd.DataFrame.from_dict(rows, orient="index", columns=[*model.ions, "count", "thickness"])


def to_table(model: CountModel, solution: Solution) -> str:
    board = play_board(model, solution)
    text = board.to_string(float_format=lambda v: f"{v:.2f}", na_rep="")
    footer = f"solver={solution.solver} status={solution.status} iterations={solution.iterations} sse={solution.sse:.3e}"
    return text + "\n" + footer + "\n"
