"""Kernel selection: compiled elimination if available, pure Python otherwise.

RUMINBGG_KERNEL=py forces the pure kernel, =cy insists on the compiled one
(raising if it was not built); unset picks the compiled one when present.
"""

import os

_forced = os.environ.get("RUMINBGG_KERNEL", "").strip().lower()

if _forced in ("py", "python"):
    from . import ffelim_py as _impl

    BACKEND = "python"
elif _forced in ("cy", "cython"):
    from . import _ffelim as _impl  # type: ignore[attr-defined]

    BACKEND = "cython"
elif _forced == "":
    try:
        from . import _ffelim as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import ffelim_py as _impl

        BACKEND = "python"
else:
    raise RuntimeError(f"RUMINBGG_KERNEL must be 'py' or 'cy', got {_forced!r}")

rank_sparse = _impl.rank_sparse
