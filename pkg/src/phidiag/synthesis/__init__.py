from zuper_commons.logs import ZLogger

logger = ZLogger(__name__)

from .structures import *
from .augmented import *
from .constrained import *
from .verifier import *
from .dot import *
