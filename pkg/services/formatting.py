import math


def format_count(value: float) -> str:
    """Shortest text that reads back to the same float; integers without a point."""
    value = float(value)
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def format_number(value: float) -> str:
    """17 significant digits, JSON-safe (non-finite values become null)."""
    value = float(value)
    if not math.isfinite(value):
        return "null"
    return format(value, ".17g")
