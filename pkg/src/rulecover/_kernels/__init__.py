"""Counting kernels behind the fitting algorithms.

Two interchangeable backends provide the same functions: a Cython extension
(``_core``) compiled at install time and a pure-numpy fallback (``_pyimpl``).
The compiled backend is selected automatically when present; set the
environment variable ``RULECOVER_KERNELS`` to ``python`` or ``compiled`` to
force one (used by the benchmark suite and the equivalence tests).
"""

import os

import numpy as np

from . import _pyimpl

try:
    from . import _core
except ImportError:
    _core = None

_IMPLS = {"python": _pyimpl}
if _core is not None:
    _IMPLS["compiled"] = _core

_requested = os.environ.get("RULECOVER_KERNELS", "").strip().lower()
if _requested and _requested not in _IMPLS:
    raise ImportError(
        f"RULECOVER_KERNELS={_requested!r} is not available; "
        f"choices: {sorted(_IMPLS)}"
    )

_impl = _IMPLS[_requested] if _requested else _IMPLS.get("compiled", _pyimpl)

BACKEND = "compiled" if _impl is _core else "python"


def available_backends():
    return dict(_IMPLS)


def use_backend(name):
    """Rebind the kernel functions to a named backend (benchmarking hook)."""
    global _impl, BACKEND
    if name not in _IMPLS:
        raise KeyError(f"unknown kernel backend {name!r}; choices: {sorted(_IMPLS)}")
    _impl = _IMPLS[name]
    BACKEND = name


def leaf_label_env_counts(preds, y, e, n_env):
    """Per-rule (label, environment) counts over samples the rule maps to 0.

    ``preds`` is an (m, n_rules) 0/1 matrix of rule outputs. Returns an
    (n_rules, 2, n_env) int64 array where cell [r, a, b] counts the samples
    with preds[i, r] == 0, y[i] == a and e[i] == b.
    """
    preds = np.ascontiguousarray(preds, dtype=np.uint8)
    y = np.ascontiguousarray(y, dtype=np.uint8)
    e = np.ascontiguousarray(e, dtype=np.int64)
    if preds.ndim != 2 or y.ndim != 1 or e.ndim != 1:
        raise ValueError("preds must be 2-D; y and e must be 1-D")
    if not (preds.shape[0] == y.shape[0] == e.shape[0]):
        raise ValueError("preds, y and e disagree on the sample count")
    return _impl.leaf_label_env_counts(preds, y, e, int(n_env))


def stratified_label_env_counts(strata, n_strata, y, e, n_env):
    """(label, environment) counts per stratum.

    ``strata`` holds dense ids in [0, n_strata). Returns an
    (n_strata, 2, n_env) int64 array of counts.
    """
    strata = np.ascontiguousarray(strata, dtype=np.int64)
    y = np.ascontiguousarray(y, dtype=np.uint8)
    e = np.ascontiguousarray(e, dtype=np.int64)
    if not (strata.shape[0] == y.shape[0] == e.shape[0]):
        raise ValueError("strata, y and e disagree on the sample count")
    return _impl.stratified_label_env_counts(strata, int(n_strata), y, e, int(n_env))
