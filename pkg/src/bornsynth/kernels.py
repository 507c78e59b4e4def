"""Backend selection for the betting hot loop.

The compiled extension is used when it imports; otherwise the pure-Python
twin takes over. Set ``BORNSYNTH_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _bandit_py

BACKEND = "python"
run_bandit = _bandit_py.run_bandit

if os.environ.get("BORNSYNTH_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _bandit  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        pass
    else:
        run_bandit = _bandit.run_bandit
        BACKEND = "cython"

__all__ = ["BACKEND", "run_bandit"]
