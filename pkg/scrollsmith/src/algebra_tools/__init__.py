"""Exact scalar arithmetic, dense matrices, polynomials and first-order jets."""
from .fields import *
from .matrix import *
from .poly import *
from .jets import *
