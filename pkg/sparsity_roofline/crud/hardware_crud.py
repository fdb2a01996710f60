try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import List

from pydantic import ValidationError

from sparsity_roofline.models.hardware_model import EngineClass, HardwareProfile
from sparsity_roofline.utils.constants import HARDWARE_DIR, Errors
from sparsity_roofline.utils.exceptions import ProfileValidationError
from sparsity_roofline.utils.logger import logger
from sparsity_roofline.utils.validation import first_error

# Profile files spell the bandwidth with its unit.
FIELD_RENAMES = {"peak_mem_bw": "peak_mem_bw_bytes_per_s"}
# sparse_matrix is the only optional peak.
REQUIRED_PEAKS = (EngineClass.SCALAR_CORE, EngineClass.MATRIX_UNIT)


def load_profile(path: Path) -> HardwareProfile:
    """
    Reads a TOML hardware profile: name, [peak_flops] scalar/matrix/sparse_matrix and
    peak_mem_bw_bytes_per_s.
    """
    logger.debug(f"loading hardware profile {path}")
    try:
        with open(path, "rb") as file:
            raw = tomllib.load(file)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        logger.error(f"Hardware profile {path} could not be read")
        raise ProfileValidationError(Errors.PROFILE_PARSE.format(path=path, detail=exc))

    fields = {"name": "name", "peak_flops": "peak_flops", "peak_mem_bw": "peak_mem_bw_bytes_per_s"}
    data = {field: raw[key] for field, key in fields.items() if key in raw}
    try:
        profile = HardwareProfile.model_validate(data)
    except ValidationError as exc:
        field, detail = first_error(exc, FIELD_RENAMES)
        raise ProfileValidationError(Errors.PROFILE_FIELD.format(path=path, field=field, detail=detail))

    for engine in REQUIRED_PEAKS:
        if engine.value not in raw["peak_flops"]:
            raise ProfileValidationError(Errors.PROFILE_FIELD.format(
                path=path, field=f"peak_flops.{engine.value}", detail="Field required",
            ))
    return profile


def list_bundled_profiles() -> List[str]:
    return sorted(path.stem for path in HARDWARE_DIR.glob("*.toml"))
