"""Python front end for the memnet compiler.

Numbers may be ints, Fractions, decimal strings or "p/q" strings; floats are
passed through repr(), so 0.1 means exactly 1/10.
"""

from fractions import Fraction

from . import _core
from ._core import MemnetError, metrics, oracle

__all__ = ["MemnetError", "build", "evaluate", "verify", "metrics", "oracle", "cli"]


def _text(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _table(points):
    return [[_text(v) for v in p] for p in points]


def build(points, labels, mode="sqrt", L=0, B=0, epsilon=None, seed=0):
    eps = None if epsilon is None else _text(epsilon)
    return _core.build(_table(points), [_text(y) for y in labels], mode, L, B, eps, seed)


def evaluate(net, points):
    return [Fraction(v) for v in _core.evaluate(net, _table(points))]


def verify(net, points, targets, tolerance=0):
    return _core.verify(net, _table(points), [_text(y) for y in targets], _text(tolerance))


def cli(*args):
    return _core.cli([str(a) for a in args])
