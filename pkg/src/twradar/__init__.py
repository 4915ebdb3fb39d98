"""Through-wall FMCW radar simulation and spectrogram analysis toolkit."""

from twradar.constants import C
from twradar.errors import TwrError

__version__ = "0.1.0"

__all__ = ["C", "TwrError", "__version__"]
