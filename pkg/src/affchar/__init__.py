"""Characters, branching rules and singular vectors for affine sl(2) at fractional level."""

from .series import BiSeries, QSeries

__all__ = ["BiSeries", "QSeries"]
__version__ = "0.1.0"
