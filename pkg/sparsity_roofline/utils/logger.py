import logging

from sparsity_roofline.utils.settings import get_settings

# Logs go to stderr so emitted tables on stdout stay parseable.
console_handler = logging.StreamHandler()
console_handler.setLevel(logging.DEBUG)

formatter = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s')
console_handler.setFormatter(formatter)

logger = logging.getLogger('sparsity_roofline')
logger.setLevel(get_settings().log_level)

logger.addHandler(console_handler)


def set_verbose(verbose: bool) -> None:
    logger.setLevel(logging.DEBUG if verbose else get_settings().log_level)
