"""Hot kernels with a compiled core and a pure-Python fallback.

The compiled extension is used when it imports; set ``XORSMC_PURE_PYTHON=1``
to force the fallback.  ``BACKEND`` names the active implementation.
"""

import os

from . import _pycore

SAT = _pycore.SAT
UNSAT = _pycore.UNSAT
UNKNOWN = _pycore.UNKNOWN

_compiled = None
if not os.environ.get("XORSMC_PURE_PYTHON"):
    try:
        from . import _ccore as _compiled
    except ImportError:
        _compiled = None

if _compiled is not None:
    solve_cnf = _compiled.solve_cnf
    count_projected = _compiled.count_projected
    BACKEND = "compiled"
else:
    solve_cnf = _pycore.solve_cnf
    count_projected = _pycore.count_projected
    BACKEND = "python"


def backends():
    """Map of available backend name -> module, compiled first."""
    out = {}
    if _compiled is not None:
        out["compiled"] = _compiled
    out["python"] = _pycore
    return out
