"""Singular rational scrolls in P^5 and the cubic fourfolds that contain them."""
from .src.algebra_tools import *
from .src.groebner_tools import *
from .src.scroll_tools import *
from .src.scroll_gen import *
from .src.cubic_tools import *
from .src.dim_tools import *
from .src.config import *
from .src.certificates import *
from .src.verification import *

__version__ = "0.1.0"
