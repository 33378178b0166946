"""Rotation, Birkhoff-sum and two-cusp flow toolkit (Python front end to the C++ core)."""

import json
from fractions import Fraction

from . import _core
from ._core import ToruslabError, kappa, mu_infinity, preset_names, verify_tags

__version__ = _core.__version__

__all__ = [
    "ToruslabError",
    "angle",
    "birkhoff_sum",
    "birkhoff_sum_double",
    "classify",
    "e_measure",
    "error_info",
    "kappa",
    "mu_infinity",
    "preset_names",
    "replay",
    "run_preset",
    "sweep",
    "theta",
    "verify",
    "verify_tags",
]


def _text(v):
    if isinstance(v, (list, tuple)):
        return ",".join(str(int(a)) for a in v)
    return str(v)


def angle(spec):
    """Convergent table of a named angle or a quotient list."""
    return json.loads(_core.angle_json(_text(spec)))


def birkhoff_sum(spec, x, n):
    return Fraction(_core.birkhoff_sum(_text(spec), str(x), int(n)))


def birkhoff_sum_double(spec, x, n):
    value, rel_error, flagged = _core.birkhoff_sum_double(_text(spec), str(x), int(n))
    return {"value": value, "rel_error_bound": rel_error, "condition_flag": flagged}


def theta(spec, x, beta, n):
    return Fraction(_core.theta(_text(spec), str(x), str(beta), int(n)))


def e_measure(spec, n, ell):
    return Fraction(_core.e_measure(_text(spec), int(n), int(ell)))


def verify(tag, samples=0, seed=1, mode="", **params):
    if "quotients" in params:
        params["quotients"] = _text(params["quotients"])
    params = {k: str(v) if isinstance(v, Fraction) else v for k, v in params.items()}
    return json.loads(_core.verify(tag, samples, seed, json.dumps(params), mode))


def classify(spec, p, q, d_p=1.0, d_q=1.0, depth=-1):
    p = (str(p[0]), str(p[1]))
    q = (str(q[0]), str(q[1]))
    return json.loads(_core.classify(_text(spec), p, q, d_p, d_q, depth))


def run_preset(name, out_dir, **overrides):
    return json.loads(_core.run_preset(name, json.dumps(overrides), str(out_dir)))


def replay(manifest, out_dir):
    identical, mismatches = _core.replay(str(manifest), str(out_dir))
    return identical, list(mismatches)


def sweep(grid, threads=0):
    """Runs a parameter grid and returns the CSV text."""
    return _core.sweep_csv(json.dumps(grid), threads)


def error_info(exc):
    """Structured payload of a ToruslabError."""
    return json.loads(str(exc))
