"""Flat and sublevel parallelogram covers of polynomial graphs.

Polynomials, covers and reports are plain dicts in the same JSON layout the
command line tool reads and writes.
"""

import json

from . import _core
from ._core import EngineError, InvalidArgument, PreconditionError, Unsupported

__all__ = [
    "EngineError",
    "InvalidArgument",
    "PreconditionError",
    "Unsupported",
    "cover",
    "estimate",
    "evaluate",
    "hessian_det",
    "polynomial",
    "sweep",
    "verify",
]


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def polynomial(nvars, terms):
    """Build a polynomial dict from {exponent tuple: coefficient}."""
    items = sorted((tuple(a), float(c)) for a, c in terms.items() if c != 0)
    degree = max((sum(a) for a, _ in items), default=0)
    return {
        "nvars": nvars,
        "degree": degree,
        "terms": [{"alpha": list(a), "c": c} for a, c in items],
    }


def evaluate(phi, x):
    return _core.eval(_text(phi), list(x))


def hessian_det(phi):
    return json.loads(_core.hessian_det(_text(phi)))


def cover(phi, delta, mode="uniform", eps=1.0, **kw):
    return json.loads(_core.cover(_text(phi), mode, delta, eps, **kw))


def verify(phi, cov, **kw):
    return json.loads(_core.verify(_text(phi), _text(cov), **kw))


def estimate(phi, cov, **kw):
    return json.loads(_core.estimate(_text(phi), _text(cov), **kw))


def sweep(phi, deltas, mode="uniform", **kw):
    return json.loads(_core.sweep(_text(phi), list(deltas), mode, **kw))
