from sparsity_roofline.utils.constants import ExitCode


class RooflineError(Exception):
    exit_code = ExitCode.DATA_ERROR


class ConfigError(RooflineError):
    exit_code = ExitCode.CONFIG_ERROR


class DataError(RooflineError):
    exit_code = ExitCode.DATA_ERROR


class PhysicalInconsistencyError(RooflineError):
    exit_code = ExitCode.PHYSICAL_INCONSISTENCY


class ProfileValidationError(ConfigError):
    pass


class MissingEnginePeakError(ConfigError):
    pass


class ModelSpecError(ConfigError):
    pass


class InvalidGeometryError(ModelSpecError):
    pass


class SparsityConfigError(ConfigError):
    pass


class EngineMapError(ConfigError):
    pass


class RunConfigError(ConfigError):
    pass


class CostOverflowError(DataError):
    pass


class UndefinedIntensityError(DataError):
    pass


class MatrixMarketError(DataError):
    pass


class PatternConstraintError(DataError):
    pass


class AccuracyDataError(DataError):
    pass


class MeasurementDataError(DataError):
    pass


class EmptyJoinError(DataError):
    pass


class EmitError(DataError):
    pass
