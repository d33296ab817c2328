"""
Utilities for POVM files and report envelopes
"""
from .helpers import (
    format_error_response,
    format_success_response,
    load_povm,
    load_povm_document,
    save_povm_document,
    write_report,
)

__all__ = [
    'format_error_response',
    'format_success_response',
    'load_povm',
    'load_povm_document',
    'save_povm_document',
    'write_report',
]
