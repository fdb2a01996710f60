from typing import Dict, Tuple

from pydantic import ValidationError


def first_error(exc: ValidationError, renames: Dict[str, str] | None = None) -> Tuple[str, str]:
    """
    Returns (dotted field path, message) of the first pydantic error, with file-schema
    names substituted for model field names.
    """
    error = exc.errors()[0]
    parts = [str(part) for part in error["loc"] if part != "[key]"]
    field = ".".join(parts) or "<root>"
    for model_name, file_name in (renames or {}).items():
        if field == model_name or field.startswith(model_name + "."):
            field = file_name + field[len(model_name):]
    message = error["msg"].removeprefix("Value error, ")
    return field, message
