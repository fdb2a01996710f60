from enum import IntEnum
from pathlib import Path


class ExitCode(IntEnum):
    OK = 0
    CONFIG_ERROR = 2
    DATA_ERROR = 3
    PHYSICAL_INCONSISTENCY = 4


class Errors:
    PROFILE_PARSE = "Could not parse hardware profile {path}: {detail}"
    PROFILE_FIELD = "Invalid hardware profile {path}: field '{field}' {detail}"
    MISSING_ENGINE_PEAK = "Hardware profile '{profile}' has no peak for engine '{engine}'"
    NEGATIVE_AI = "Arithmetic intensity must be >= 0, got {ai}"

    INVALID_GEOMETRY = "Layer '{layer_id}': convolution output is {out_h}x{out_w}, must be at least 1x1"
    GROUPED_CONV = "Layer '{layer_id}': grouped/depthwise convolution (groups={groups}) is not supported"
    DUPLICATE_LAYER_ID = "Duplicate layer id: '{layer_id}'"
    NO_PRUNABLE_LAYERS = "Model '{model}' has no prunable layers"
    MODEL_SPEC_PARSE = "Could not parse model spec {path}: {detail}"
    MODEL_SPEC_FIELD = "Invalid model spec {path}: field '{field}' {detail}"
    UNKNOWN_LAYER = "Model '{model}' has no layer '{layer_id}'"
    LAYER_FAILED = "Layer '{layer_id}': {detail}"

    SPARSITY_ENCODING = "Invalid sparsity encoding '{text}': {detail}"
    SPARSITY_LEVEL = "Sparsity level must be in [0, 1), got {level}"
    DENSE_LEVEL = "Dense pattern requires level 0, got {level}"
    NM_LEVEL = "N:M pattern {n}:{m} fixes the level at {expected}, got {level}"
    BLOCK_DIVISIBILITY = "Block {b_h}x{b_w} does not divide a {m}x{k} weight matrix"
    NM_DIVISIBILITY = "N:M group size {m_group} does not divide k={k}"
    COST_OVERFLOW = "Cost of {what} overflows a 64-bit count ({value})"
    UNDEFINED_AI = "Arithmetic intensity is undefined for zero bytes moved"

    NON_POSITIVE_TOTAL = "Speedup needs positive totals, got dense={dense} sparse={sparse}"
    FASTER_THAN_LIGHT = "Measured latency {measured:.6g}s for '{scope}' is faster than speed-of-light {sol:.6g}s"
    ENGINE_MAP = "Invalid engine mapping '{text}': {detail}"
    ENGINE_NOT_MAPPED = "Engine map has no entry for pattern '{pattern}'"

    MM_HEADER = "{path}:{line}: {detail}"
    MM_BOUNDS = "{path}:{line}: entry ({row}, {col}) is outside a {nrows}x{ncols} matrix"
    MM_DUPLICATE = "{path}:{line}: duplicate entry ({row}, {col})"
    BLOCK_PATTERN_DIVISIBILITY = "Block {b_h}x{b_w} does not divide a {nrows}x{ncols} pattern"
    NM_CONSTRAINT = "Pattern violates {n}:{m} at row {row}, group {group} ({count} nonzeros)"

    ACCURACY_PARSE = "{path}:{line}: {detail}"
    ACCURACY_DUPLICATE = "{path}:{line}: duplicate accuracy record {key}"
    MEASUREMENT_PARSE = "{path}:{line}: {detail}"
    EMPTY_JOIN = "No speedup record joined with an accuracy record"
    EMPTY_SVG = "Cannot render an SVG chart without data"
    UNWRITABLE = "Cannot write {path}: {detail}"
    UNKNOWN_FORMAT = "Unknown output format '{fmt}'"

    RUN_CONFIG_PARSE = "Could not parse run config {path}: {detail}"
    RUN_CONFIG_EMPTY = "Run config needs at least one {what}"
    VALIDATE_SINGLE = "validate needs exactly one model and one batch size, got {models} model(s) and {batches} batch size(s)"
    NO_MATRICES = "No MatrixMarket files found in {directory}"


class Messages:
    WROTE = "Wrote {path}"
    SKIPPED_BLOCK = "Skipping block {b_h}x{b_w} for {name}: {detail}"
    COSTED_DENSE = "Layer '{layer_id}' is incompatible with {config}; costing it dense"
    SPEEDUP_MATCH = "predicted speedup equals measured speedup"
    SPEEDUP_MISMATCH = "dense and sparse are not equally optimized"


class Defaults:
    VALUE_BYTES = 2
    INDEX_BYTES = 4
    POINTER_BYTES = 4
    SVG_WIDTH = 640
    SVG_HEIGHT = 480
    SIGNIFICANT_DIGITS = 6
    PERCENT_OF_SOL_TOLERANCE = 0.01
    ROOF_TOLERANCE = 0.01
    TRAFFIC_BATCHES = (1, 32)
    BLOCK_SIZES = ((2, 2), (4, 4), (8, 8), (16, 16), (32, 32))
    MAX_COUNT = 2**63 - 1


PACKAGE_DIR = Path(__file__).resolve().parent.parent
DATA_DIR = PACKAGE_DIR / "data"
TEMPLATES_DIR = PACKAGE_DIR / "templates"
HARDWARE_DIR = DATA_DIR / "hardware"
MODELS_DIR = DATA_DIR / "models"
DEFAULT_PROFILE = HARDWARE_DIR / "a100_sxm4_40gb.toml"
