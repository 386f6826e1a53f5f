"""Hot-loop kernels: compiled Cython core with a pure-numpy fallback.

The backend is chosen once at import: the compiled module when it built
successfully, otherwise the fallback. Set QLI_PURE_KERNELS=1 to force the
fallback (used by the benchmark and for debugging).
"""

import os

from . import _pure

try:
    from . import _core
except ImportError:
    _core = None

if os.environ.get("QLI_PURE_KERNELS"):
    _active = _pure
else:
    _active = _core if _core is not None else _pure

COMPILED_AVAILABLE = _core is not None


def backend_name():
    return "compiled" if _active is _core and _core is not None else "pure"


toggle_samples = _active.toggle_samples
fips_block_stats = _active.fips_block_stats
