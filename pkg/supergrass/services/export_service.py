import json
import logging
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def _default(value: Any):
    """JSON fallback for the few non-native values that reach the exporter"""
    if isinstance(value, Fraction):
        return {"num": value.numerator, "den": value.denominator}
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    return str(value)


class ExportService:
    """Service for rendering computation results as JSON or plain-text tables"""

    def to_json(self, command: str, payload: Dict[str, Any]) -> str:
        """
        Serialize a result payload deterministically

        Args:
            command: Name of the command that produced the payload
            payload: Output of a domain object's to_dict()

        Returns:
            JSON text with sorted keys and a top-level schema version
        """
        document = {"schema": SCHEMA_VERSION, "command": command, "result": payload}
        logger.debug(f"Serializing {command} result with schema {SCHEMA_VERSION}")
        return json.dumps(document, sort_keys=True, indent=2, default=_default)

    def to_table(self, rows: Sequence[Sequence[Any]], headers: Optional[Sequence[str]] = None) -> str:
        """Render rows as left-aligned columns separated by two spaces"""
        cells: List[List[str]] = [[str(c) for c in row] for row in rows]
        if headers:
            cells.insert(0, [str(h) for h in headers])
        if not cells:
            return ""
        width = max(len(row) for row in cells)
        cells = [row + [""] * (width - len(row)) for row in cells]
        widths = [max(len(row[i]) for row in cells) for i in range(width)]

        lines = []
        for index, row in enumerate(cells):
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
            if headers and index == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines)

