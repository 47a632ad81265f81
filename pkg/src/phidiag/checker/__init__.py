from zuper_commons.logs import ZLogger

logger = ZLogger(__name__)

from .verdict import *
from .check import *
from .witness import *
