"""
Helpers for POVM files and report envelopes
"""
import json
import logging
from typing import Any, Dict, Optional

from pydantic import ValidationError

from .. import SCHEMA_VERSION, __version__
from ..models.errors import PovmLoadError
from ..models.quantum import Povm
from ..models.schemas import PovmDocument

logger = logging.getLogger(__name__)


def _describe_validation_error(e: ValidationError) -> str:
    first = e.errors()[0]
    where = ".".join(str(part) for part in first.get("loc", ())) or "document"
    return f"{where}: {first.get('msg')}"


def load_povm_document(path: str) -> PovmDocument:
    """Parse a POVM JSON file; errors carry the line or field they refer to"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as e:
        raise PovmLoadError(f"Cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise PovmLoadError(f"{path} line {e.lineno} column {e.colno}: {e.msg}") from e
    try:
        return PovmDocument.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        loc = first.get("loc", ())
        raise PovmLoadError(
            f"{path}: {_describe_validation_error(e)}",
            field=str(loc[0]) if loc else None,
            index=loc[1] if len(loc) > 1 and isinstance(loc[1], int) else None,
        ) from e


def load_povm(path: str, norm_tol: Optional[float] = None) -> Povm:
    doc = load_povm_document(path)
    povm = doc.to_povm(norm_tol)
    logger.debug(f"Loaded {povm.m} vectors on {povm.structure} from {path}")
    return povm


def save_povm_document(doc: PovmDocument, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(doc.model_dump_json(indent=2, exclude_none=True))
        f.write("\n")


def format_error_response(message: str, kind: str = None) -> Dict[str, Any]:
    """Format error response consistently"""
    response = {"success": False, "error": message, "schema_version": SCHEMA_VERSION}
    if kind:
        response["error_type"] = kind
    return response


def format_success_response(data: Any, message: str = None, config: Dict[str, Any] = None) -> Dict[str, Any]:
    """Format success response consistently"""
    response = {"success": True, "schema_version": SCHEMA_VERSION, "library_version": __version__}
    if message:
        response["message"] = message
    if config is not None:
        response["config"] = config
    if data is not None:
        response["data"] = data
    return response


def write_report(report: Dict[str, Any], path: Optional[str]) -> str:
    """Serialize a report; write it to path when given and return the JSON text"""
    text = json.dumps(report, indent=2, default=str)
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        logger.info(f"Report written to {path}")
    return text
