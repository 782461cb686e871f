"""Factor statistics, return words and convergence estimators for symbolic sequences."""

__version__ = "0.1.0"

from .words import Alphabet, Word  # noqa: E402
from .index import FactorIndex, build_index  # noqa: E402

__all__ = ["Alphabet", "Word", "FactorIndex", "build_index", "__version__"]
