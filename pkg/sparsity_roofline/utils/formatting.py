from sparsity_roofline.utils.constants import Defaults


def fmt(value: float | int) -> str:
    """Fixed significant-digit text for diff-stable output files."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    text = f"{value:.{Defaults.SIGNIFICANT_DIGITS}g}"
    return "0" if text == "-0" else text


def level_key(level: float) -> str:
    """Sparsity levels compare by their 6-significant-digit text."""
    return fmt(float(level))
