from .codes import *
from .errors import *
