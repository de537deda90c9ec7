"""Parametrized curves in M^n(c) x R."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ambient import ProductAmbient
from .jets import Jet


@dataclass(frozen=True)
class CurveSpec:
    """A curve s -> gamma(s) given by a map accepting floats, arrays or 1-variable jets.

    ``fn`` returns ambient coordinates with the vector axis last.
    """

    ambient: ProductAmbient
    fn: Callable
    interval: tuple
    arc_length: bool = True
    periodic: bool = False
    label: str = ""
    params: dict = field(default_factory=dict)

    def __call__(self, s):
        return self.fn(s)

    def jets(self, s, order: int = 4) -> Jet:
        """Coordinate jets at parameter values ``s`` (batch shape ``s.shape + (d,)``)."""
        s = np.asarray(s, dtype=float)
        out = self.fn(Jet.variable(s, 0, 1, order))
        if not isinstance(out, Jet):
            out = Jet.constant(np.broadcast_to(out, s.shape + (self.ambient.d,)), 1, order)
        return out

    def samples(self, count: int, margin: float = 0.0) -> np.ndarray:
        lo, hi = self.interval
        if self.periodic:
            return np.linspace(lo, hi, count, endpoint=False)
        return np.linspace(lo + margin, hi - margin, count)
