# Numba is used for the hot loops unless TORAL_ORBITS_NO_NUMBA is set to a
# truthy value (or numba cannot be imported); the numpy paths then take over.

import logging
import os

logger = logging.getLogger(__name__)

_flag = os.environ.get("TORAL_ORBITS_NO_NUMBA", "").strip().lower()
DISABLED_BY_ENV = _flag not in ("", "0", "false", "no")

try:
    import numba

    njit = numba.njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(pyfunc=None, **kwargs):
        def wrap(func):
            return func

        return wrap if pyfunc is None else wrap(pyfunc)

    logger.warning("numba not importable; using numpy kernels")

USE_NUMBA = HAVE_NUMBA and not DISABLED_BY_ENV
