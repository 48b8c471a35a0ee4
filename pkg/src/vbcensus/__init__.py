"""Counting complex vector bundles over CP^l with vanishing Chern classes.

The pipeline runs mod-p Steenrod algebra arithmetic, minimal resolutions of
stunted projective spaces (Adams E2 charts), assembly of stable homotopy
groups, and Atiyah-Hirzebruch bookkeeping. See ``vbcensus.cli`` for the
command line front end.
"""

__version__ = "0.1.0"

from .census import census, count_bundles  # noqa: E402
from .steenrod import SteenrodElement, adem_normalize  # noqa: E402

__all__ = ["SteenrodElement", "adem_normalize", "census", "count_bundles", "__version__"]
