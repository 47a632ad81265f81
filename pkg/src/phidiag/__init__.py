from logging import INFO
from typing import ClassVar

from zuper_commons.logs import ZLogger

logger = ZLogger(__name__)

logger.setLevel(INFO)


class PhiDiagConstants:
    """Global constants for the library."""

    checks: ClassVar[bool] = True
    """
        If true activates extra safety checks and assertions.
        Mainly on model construction and on the products built from it.
    """


from .utils_toolz import *
from .models import *
from .ltl import *
