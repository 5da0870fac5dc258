"""Line complexity of additive cellular automata over Z/p."""
from .automaton import AutomatonSpec
from .complexity import ScanPolicy, line_complexity
from .gfpoly import GfpPoly, parse_poly

__all__ = ["AutomatonSpec", "GfpPoly", "ScanPolicy", "line_complexity", "parse_poly"]
__version__ = "0.1.0"
