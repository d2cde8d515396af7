import hashlib
import logging
import os
from pathlib import Path
from typing import Callable, Dict, Tuple

from models.count_models import CountModel
from models.ingest_models import ModelDocument
from services.config import MAX_INPUT_BYTES
from services.error_handler import InputFileError, ValidationError
from services.expression_parser import parse_expression
from services.grid_io import parse_grid
from services.match_ingest import comparison_graph_connected, from_matches, read_matches

logger = logging.getLogger(__name__)


def _parse_matches(text: str) -> CountModel:
    records = read_matches(text)
    comparison_graph_connected(records)
    return from_matches(records)


INPUT_FORMATS: Dict[str, Callable[[str], CountModel]] = {
    "expr": parse_expression,
    "grid": parse_grid,
    "matches": _parse_matches,
    "json": lambda text: import_model(text),
}


# ---------------- FILE HANDLING ----------------
def validate_input_file(file_path) -> Path:
    """Existence, size limit and a cheap binary sniff before anything is parsed"""
    path = Path(file_path)
    if not path.is_file():
        raise InputFileError(f"input file not found: {path}")

    file_size = os.path.getsize(path)
    if file_size == 0:
        raise InputFileError(f"input file is empty: {path}")
    if file_size > MAX_INPUT_BYTES:
        size_mb = MAX_INPUT_BYTES / 1024 / 1024
        raise InputFileError(
            f"input file exceeds {size_mb:.0f}MB limit: {(file_size / 1024 / 1024):.2f}MB"
        )

    with open(path, "rb") as f:
        head = f.read(8192)
    if b"\x00" in head:
        raise InputFileError(f"input file looks binary: {path}")
    return path


def calculate_file_hash(file_path) -> str:
    """Calculate SHA-256 hash of a file"""
    hash_sha256 = hashlib.sha256()
    with open(file_path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            hash_sha256.update(chunk)
    return hash_sha256.hexdigest()


def read_input_text(file_path) -> Tuple[str, str]:
    """Return (text, sha256 digest) of a validated input file"""
    path = validate_input_file(file_path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise InputFileError(f"input file is not UTF-8 text: {e}")
    return text, calculate_file_hash(path)


def load_model(file_path, fmt: str) -> Tuple[CountModel, str]:
    if fmt not in INPUT_FORMATS:
        raise ValidationError(f"unknown input format '{fmt}' (choose from {', '.join(INPUT_FORMATS)})")
    text, digest = read_input_text(file_path)
    model = INPUT_FORMATS[fmt](text)
    logger.info(f"Loaded {fmt} model from {file_path}: n={model.n}, q={model.q}, sha256={digest[:12]}")
    return model, digest


# ---------------- STRUCTURED EXPORT ----------------
def export_model(model: CountModel) -> str:
    return ModelDocument.from_model(model).model_dump_json(indent=2)


def import_model(text: str) -> CountModel:
    try:
        document = ModelDocument.model_validate_json(text)
    except ValueError as e:
        raise ValidationError(f"malformed model document: {e}")
    return document.to_model()
