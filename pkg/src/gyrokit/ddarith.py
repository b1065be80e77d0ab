"""Compensated double-double arithmetic on numpy arrays.

A value is carried as an unevaluated sum hi + lo of two float64 arrays
with |lo| <= ulp(hi)/2, giving roughly 32 significant decimal digits.
This is fixed-precision compensated arithmetic built from ordinary
doubles (error-free transformations), not an arbitrary-precision type.

Why it exists: the verification suites compare both sides of algebraic
laws. Near the carrier boundary the composed operations amplify the
last-bit rounding of intermediate points by factors up to ~1/(1-|x|^2),
which swamps any sensible tolerance even though the law itself holds
exactly. Evaluating each side in double-double from the sampled inputs
and rounding once at the end removes that artifact; the plain float64
kernels stay the public-facing implementation.
"""

from __future__ import annotations

import numpy as np

_SPLIT = 134217729.0  # 2**27 + 1, splits a float64 into two 26-bit halves


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    # requires |a| >= |b| (or a == 0)
    s = a + b
    return s, b - (s - a)


def _two_prod(a, b):
    p = a * b
    ca = _SPLIT * a
    ah = ca - (ca - a)
    al = a - ah
    cb = _SPLIT * b
    bh = cb - (cb - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


class DD:
    """A numpy array of double-double values."""

    __slots__ = ("hi", "lo")

    def __init__(self, hi, lo=None):
        self.hi = np.asarray(hi, dtype=np.float64)
        self.lo = np.zeros_like(self.hi) if lo is None else lo

    @classmethod
    def const(cls, c, like):
        return cls(np.full_like(like.hi, float(c)))

    def _coerce(self, other):
        if isinstance(other, DD):
            return other
        return DD.const(other, self)

    def __add__(self, other):
        other = self._coerce(other)
        s, e = _two_sum(self.hi, other.hi)
        t, f = _two_sum(self.lo, other.lo)
        e = e + t
        s, e = _quick_two_sum(s, e)
        e = e + f
        s, e = _quick_two_sum(s, e)
        return DD(s, e)

    __radd__ = __add__

    def __neg__(self):
        return DD(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        p, e = _two_prod(self.hi, other.hi)
        e = e + (self.hi * other.lo + self.lo * other.hi)
        p, e = _quick_two_sum(p, e)
        return DD(p, e)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        q1 = self.hi / other.hi
        r = self - other * DD(np.asarray(q1))
        q2 = r.hi / other.hi
        r = r - other * DD(np.asarray(q2))
        q3 = r.hi / other.hi
        s, e = _quick_two_sum(q1, q2)
        return DD(s, e) + DD(np.asarray(q3))

    def __rtruediv__(self, other):
        return DD.const(other, self) / self

    def sqrt(self):
        r = 1.0 / np.sqrt(self.hi)
        a = DD(np.asarray(self.hi * r))
        err = self - a * a
        half_r = 0.5 * r
        return a + DD(err.hi * half_r, err.lo * half_r)

    def value(self) -> np.ndarray:
        return self.hi + self.lo

    def __getitem__(self, idx):
        return DD(self.hi[idx], self.lo[idx])


def lift_vector(x: np.ndarray) -> list:
    """(n, d) float array -> list of d DD columns."""
    x = np.asarray(x, dtype=np.float64)
    return [DD(np.ascontiguousarray(x[..., i])) for i in range(x.shape[-1])]


def lower_vector(cols: list) -> np.ndarray:
    return np.stack([c.value() for c in cols], axis=-1)


def dot(u: list, v: list) -> DD:
    acc = u[0] * v[0]
    for i in range(1, len(u)):
        acc = acc + u[i] * v[i]
    return acc
