from __future__ import absolute_import
from .interfaces import *
from .prelude import log
from .special import *
from .state import *
from .matrix import *
from .markov import *
from .polya import *
from .optimize import *
from .smoothing import *
from .analysis import *
from .application import *

__version__ = VERSION
