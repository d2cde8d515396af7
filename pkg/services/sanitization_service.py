import re
import logging
import unicodedata

from services.error_handler import ValidationError

logger = logging.getLogger(__name__)

_SUPERSCRIPTS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹⁻⁺", "0123456789-+")
_SUBSCRIPTS = str.maketrans("₀₁₂₃₄₅₆₇₈₉", "0123456789")


class SanitizationService:
    def __init__(self, max_length: int = 1_000_000):
        self.max_length = max_length
        # Typographic operators pasted from typeset documents
        self.operator_map = {
            "−": "-",   # minus sign
            "–": "-",   # en dash
            "·": "*",   # middle dot
            "⋅": "*",   # dot operator
            "×": "*",   # multiplication sign
            "∕": "/",   # division slash
        }
        self.superscript_run = re.compile(r"[⁰¹²³⁴⁵⁶⁷⁸⁹⁻⁺]+")
        self.control_chars = re.compile(r"[\x00-\x08\x0b\x0c\x0e-\x1f\x7f]")

    def sanitize_expression(self, text: str) -> str:
        """
        Normalize a likelihood expression to the ASCII grammar
        """
        if not isinstance(text, str):
            raise ValidationError("expression must be text")
        if len(text) > self.max_length:
            raise ValidationError(f"expression longer than {self.max_length} characters")

        text = text.lstrip("﻿")
        if self.control_chars.search(text):
            raise ValidationError("expression contains control characters")

        text = unicodedata.normalize("NFC", text)
        for symbol, replacement in self.operator_map.items():
            text = text.replace(symbol, replacement)
        text = text.translate(_SUBSCRIPTS)
        text = self.superscript_run.sub(lambda m: "^" + m.group().translate(_SUPERSCRIPTS), text)

        # Comments run to the end of the line
        text = re.sub(r"#[^\n]*", "", text)
        text = re.sub(r"\s+", " ", text).strip()

        logger.debug(f"Sanitized expression: {text[:100]}...")
        return text

    def sanitize_identifier(self, identifier: str) -> str:
        """
        Player and ion identifiers: word characters, dots and hyphens only
        """
        if identifier is None:
            return ""
        identifier = str(identifier).strip()
        identifier = re.sub(r"[^\w.\-]", "", identifier)
        return identifier[:100]


# Global instance
sanitization_service = SanitizationService()
