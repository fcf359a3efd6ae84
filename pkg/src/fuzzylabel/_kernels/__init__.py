"""Numerical kernels with a compiled backend and a numpy fallback.

The compiled extension is used when it imports; setting the environment
variable ``FUZZYLABEL_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

if _ckernels is not None and not os.environ.get("FUZZYLABEL_PURE_PYTHON"):
    BACKEND = "cython"
else:
    BACKEND = "python"

_impl = _BACKENDS[BACKEND]

pairwise_sq_dists = _impl.pairwise_sq_dists
knn_indices = _impl.knn_indices
fcm_memberships = _impl.fcm_memberships
propagate = _impl.propagate


def available_backends():
    return sorted(_BACKENDS)


def get_backend(name):
    """Return the kernel module for ``name`` ("cython" or "python")."""
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available "
                         f"(have: {', '.join(available_backends())})") from None
