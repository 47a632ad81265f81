from .formula import *
from .parser import *
from .semantics import *
from .buchi import *
from .translation import *
from .labeling import *
