from zuper_commons.logs import ZLogger

logger = ZLogger(__name__)

from .structures import *
from .scenarios import *
from .factory import *
