"""Multi-threaded 2-D discrete wavelet transform with four lifting/convolution schemes."""

from wavelift.poly2 import LaurentPoly2
from wavelift.wavelets import WaveletSpec, LiftingPair, builtin, load_custom
from wavelift.schemes import (
    SCHEME_NAMES,
    build,
    build_all,
    count_ops,
    invert,
    verify_equivalence,
)
from wavelift.engine import ExtensionMode, QuadField, Engine, make_plan, forward, inverse

__version__ = "0.1.0"
