"""Pairwise matches as count models.

A match i-j with scores s_i, s_j contributes s_i to a_i, s_j to a_j and
-(s_i + s_j) to the pair pattern {i, j}.
"""
import io
import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from models.count_models import CountModel
from models.ingest_models import MatchRecord
from services.core import canonicalize
from services.error_handler import ValidationError
from services.sanitization_service import sanitization_service

logger = logging.getLogger(__name__)

MATCH_COLUMNS = ["player_i", "player_j", "score_i", "score_j"]


def read_matches(text: str) -> List[MatchRecord]:
    """Comma-separated ``player_i,player_j,score_i,score_j`` lines, no header."""
    try:
        frame = pd.read_csv(
            io.StringIO(text),
            header=None,
            names=MATCH_COLUMNS,
            index_col=False,
            comment="#",
            skipinitialspace=True,
            skip_blank_lines=True,
            dtype={"player_i": str, "player_j": str},
        )
    except pd.errors.EmptyDataError:
        raise ValidationError("match file is empty")
    except (pd.errors.ParserError, ValueError) as e:
        raise ValidationError(f"malformed match file: {e}")

    if frame.empty:
        raise ValidationError("match file is empty")
    if frame.isna().any().any():
        raise ValidationError("every match needs two players and two scores")
    scores = frame[["score_i", "score_j"]].apply(pd.to_numeric, errors="coerce")
    if scores.isna().any().any():
        raise ValidationError("match scores must be numeric")

    return [
        MatchRecord(
            player_i=sanitization_service.sanitize_identifier(row.player_i),
            player_j=sanitization_service.sanitize_identifier(row.player_j),
            score_i=float(score_i),
            score_j=float(score_j),
        )
        for row, score_i, score_j in zip(frame.itertuples(index=False), scores["score_i"], scores["score_j"])
    ]


def _players(records: Sequence[MatchRecord]) -> Dict[str, int]:
    players: Dict[str, int] = {}
    for record in records:
        players.setdefault(record.player_i, len(players))
        players.setdefault(record.player_j, len(players))
    return players


def from_matches(records: Sequence[MatchRecord]) -> CountModel:
    if not records:
        raise ValidationError("no matches to build a model from")
    players = _players(records)
    n = len(players)

    a = np.zeros(n)
    pairs: Dict[Tuple[int, int], float] = {}
    for record in records:
        i, j = players[record.player_i], players[record.player_j]
        a[i] += record.score_i
        a[j] += record.score_j
        key = (min(i, j), max(i, j))
        pairs[key] = pairs.get(key, 0.0) - record.total

    for name, index in players.items():
        if a[index] == 0:
            logger.warning(f"Player {name} scored no points; their strength estimate sits on the boundary")

    terms = [(tuple(int(k == i) for k in range(n)), a[i]) for i in range(n) if a[i] > 0]
    terms += [(tuple(int(k in key) for k in range(n)), count) for key, count in pairs.items()]
    return canonicalize(terms, ions=list(players))


def comparison_graph_connected(records: Sequence[MatchRecord]) -> bool:
    players = _players(records)
    if not players:
        return False
    rows = [players[record.player_i] for record in records]
    cols = [players[record.player_j] for record in records]
    adjacency = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(players), len(players)))
    components, _ = connected_components(adjacency, directed=False)
    if components > 1:
        logger.warning(f"Comparison graph has {components} components")
    return components == 1
