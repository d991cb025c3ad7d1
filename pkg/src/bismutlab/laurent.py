"""Finite Laurent polynomials in the scaling parameter u.

``LaurentPoly`` carries rational scalar coefficients, ``LaurentMatrix``
carries exact matrix coefficients.  Both are immutable and keep only nonzero
coefficients, so ``support`` is the exact set of occurring powers.
"""

from __future__ import annotations

from fractions import Fraction

from . import exact


class LaurentPoly:
    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        c = {}
        for k, v in (coeffs or {}).items():
            v = Fraction(v)
            if v:
                c[int(k)] = v
        self._c = c

    @classmethod
    def const(cls, value) -> "LaurentPoly":
        return cls({0: value})

    @classmethod
    def monomial(cls, power: int, value=1) -> "LaurentPoly":
        return cls({power: value})

    def coeff(self, k: int) -> Fraction:
        return self._c.get(k, Fraction(0))

    @property
    def support(self) -> frozenset:
        return frozenset(self._c)

    def items(self):
        return sorted(self._c.items())

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(other)
        return self._c == other._c

    def __hash__(self):
        return hash(tuple(self.items()))

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(other)
        out = dict(self._c)
        for k, v in other._c.items():
            out[k] = out.get(k, 0) + v
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LaurentMatrix):
            return other * self
        if not isinstance(other, LaurentPoly):
            other = Fraction(other)
            return LaurentPoly({k: v * other for k, v in self._c.items()})
        out: dict = {}
        for a, x in self._c.items():
            for b, y in other._c.items():
                out[a + b] = out.get(a + b, 0) + x * y
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __call__(self, u):
        return sum((v * Fraction(u) ** k for k, v in self._c.items()), Fraction(0))

    def __repr__(self):
        if not self._c:
            return "0"
        return " + ".join(f"({v})u^{k}" for k, v in self.items())


U = LaurentPoly.monomial(1)
U_INV = LaurentPoly.monomial(-1)


class LaurentMatrix:
    """Laurent polynomial with exact matrix coefficients of a fixed shape."""

    __slots__ = ("shape", "_c")

    def __init__(self, shape, coeffs=None):
        self.shape = tuple(shape)
        c = {}
        for k, m in (coeffs or {}).items():
            if m.shape != self.shape:
                raise ValueError(f"coefficient shape {m.shape} != {self.shape}")
            if not exact.is_zero(m):
                c[int(k)] = m
        self._c = c

    @classmethod
    def const(cls, m: exact.Mat) -> "LaurentMatrix":
        return cls(m.shape, {0: m})

    @classmethod
    def zero(cls, n: int) -> "LaurentMatrix":
        return cls((n, n))

    def coeff(self, k: int) -> exact.Mat:
        return self._c.get(k, exact.zeros(*self.shape))

    @property
    def support(self) -> frozenset:
        return frozenset(self._c)

    def items(self):
        return sorted(self._c.items(), key=lambda kv: kv[0])

    def finite_part(self) -> exact.Mat:
        return self.coeff(0)

    def __eq__(self, other):
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return self.shape == other.shape and self.support == other.support and all(
            self._c[k] == other._c[k] for k in self._c
        )

    def __add__(self, other):
        out = dict(self._c)
        for k, m in other._c.items():
            out[k] = out[k] + m if k in out else m
        return LaurentMatrix(self.shape, out)

    def __neg__(self):
        return LaurentMatrix(self.shape, {k: -m for k, m in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LaurentMatrix):
            out: dict = {}
            for a, x in self._c.items():
                for b, y in other._c.items():
                    p = x * y
                    out[a + b] = out[a + b] + p if a + b in out else p
            return LaurentMatrix((self.shape[0], other.shape[1]), out)
        if isinstance(other, LaurentPoly):
            out = {}
            for a, x in self._c.items():
                for b, y in other.items():
                    p = exact.smul(y, x)
                    out[a + b] = out[a + b] + p if a + b in out else p
            return LaurentMatrix(self.shape, out)
        if isinstance(other, exact.Mat):
            return self * LaurentMatrix.const(other)
        return LaurentMatrix(self.shape, {k: exact.smul(other, m) for k, m in self._c.items()})

    def __rmul__(self, other):
        if isinstance(other, exact.Mat):
            return LaurentMatrix.const(other) * self
        return self * other

    def __repr__(self):
        return f"LaurentMatrix(shape={self.shape}, support={sorted(self.support)})"


def lift(m) -> LaurentMatrix:
    """Promote an exact matrix to a constant Laurent matrix (no-op on Laurent input)."""
    return m if isinstance(m, LaurentMatrix) else LaurentMatrix.const(m)
