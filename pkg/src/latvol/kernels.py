"""Hot-loop dispatch: the compiled extension when importable, numpy otherwise.

Set ``LATVOL_PURE_PYTHON=1`` to force the numpy versions.
"""
import os

from . import _pykernels

BACKEND = "python"
clausen_reduced = _pykernels.clausen_reduced
symbol_logdet = _pykernels.symbol_logdet

if not os.environ.get("LATVOL_PURE_PYTHON"):
    try:
        from . import _kernels
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "compiled"
        clausen_reduced = _kernels.clausen_reduced
        symbol_logdet = _kernels.symbol_logdet

__all__ = ["BACKEND", "clausen_reduced", "symbol_logdet"]
