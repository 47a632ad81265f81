from .structures import *
from .operations import *
from .serialization import *
