"""Pick the compiled core when it is importable, else the numpy fallback."""

import os

IMPLEMENTATION = "python"

if os.environ.get("LPIMPROVE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._core import direct_convolve, sieve_odd_segment  # noqa: F401

        IMPLEMENTATION = "compiled"
    except ImportError:
        pass

if IMPLEMENTATION == "python":
    from ._fallback import direct_convolve, sieve_odd_segment  # noqa: F401
