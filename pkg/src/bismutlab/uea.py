"""Matrix-coefficient elements of a universal enveloping algebra in PBW form.

Generators carry integer weights.  The PBW order sorts generators by
``(weight, declaration index)``; monomials are stored as nondecreasing
tuples of generator indices in that order.  Normal ordering rewrites
``ba -> ab - [a, b]`` until every monomial is sorted.  Each bracket step
lowers the word length, so rewriting terminates for any Lie algebra.
Matrix coefficients commute with the generators (frozen coefficients).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import exact
from .exact import Mat

NEG_INF = -math.inf


class AlgebraMismatch(ValueError):
    pass


class OrderExceeded(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WeightedAlgebra:
    """Lie algebra on named generators with constant structure constants.

    ``brackets`` maps ``(a, b)`` (generator indices) to ``{c: coefficient}``
    for ``[g_a, g_b]``; antisymmetry is filled in automatically.
    """

    names: tuple
    weights: tuple
    brackets: dict = field(repr=False)
    filtered: bool = True

    def __post_init__(self):
        full = {}
        for (a, b), vec in self.brackets.items():
            vec = {c: Fraction(v) for c, v in vec.items() if v}
            if a == b:
                if vec:
                    raise ValueError("[g, g] must vanish")
                continue
            if (b, a) in full and full[(b, a)] != {c: -v for c, v in vec.items()}:
                raise ValueError(f"bracket of {a},{b} is not antisymmetric")
            full[(a, b)] = vec
            full[(b, a)] = {c: -v for c, v in vec.items()}
        object.__setattr__(self, "brackets", full)
        rank = sorted(range(len(self.names)), key=lambda i: (self.weights[i], i))
        object.__setattr__(self, "_rank", {g: r for r, g in enumerate(rank)})
        if self.filtered:
            for (a, b), vec in full.items():
                for c in vec:
                    if self.weights[c] != self.weights[a] + self.weights[b]:
                        raise ValueError(
                            f"bracket [{self.names[a]},{self.names[b]}] has a component of the wrong weight"
                        )

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise AlgebraMismatch(f"unknown generator {name!r}") from None

    def bracket(self, a: int, b: int) -> dict:
        return self.brackets.get((a, b), {})

    def bracket_vec(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for a, xa in x.items():
            for b, yb in y.items():
                for c, v in self.bracket(a, b).items():
                    out[c] = out.get(c, 0) + xa * yb * v
        return {c: v for c, v in out.items() if v}

    def jacobi_defect(self) -> list:
        """Triples ``(a, b, c)`` where the Jacobi identity fails."""
        bad = []
        n = self.dim
        for a in range(n):
            for b in range(a + 1, n):
                for c in range(b + 1, n):
                    total: dict = {}
                    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
                        for k, v in self.bracket_vec({x: 1}, self.bracket(y, z)).items():
                            total[k] = total.get(k, 0) + v
                    if any(total.values()):
                        bad.append((a, b, c))
        return bad

    def sort_key(self, g: int) -> int:
        return self._rank[g]

    @lru_cache(maxsize=None)
    def normal_word(self, word: tuple) -> tuple:
        """PBW normal form of a word as a sorted tuple of (monomial, coefficient)."""
        for i in range(len(word) - 1):
            a, b = word[i], word[i + 1]
            if self._rank[a] > self._rank[b]:
                out: dict = {}
                for mono, coef in self.normal_word(word[:i] + (b, a) + word[i + 2:]):
                    out[mono] = out.get(mono, 0) + coef
                for c, v in self.bracket(a, b).items():
                    for mono, coef in self.normal_word(word[:i] + (c,) + word[i + 2:]):
                        out[mono] = out.get(mono, 0) + v * coef
                return tuple(sorted((m, c) for m, c in out.items() if c))
        return ((word, Fraction(1)),)

    def weight_of(self, mono: tuple) -> int:
        return sum(self.weights[g] for g in mono)


class UEAElement:
    """Finite sum of ``coefficient matrix * PBW monomial``."""

    __slots__ = ("algebra", "dim", "degrees", "terms")

    def __init__(self, algebra: WeightedAlgebra, dim: int, terms=None, degrees=None):
        self.algebra = algebra
        self.dim = dim
        self.degrees = tuple(degrees) if degrees is not None else None
        clean = {}
        for mono, m in (terms or {}).items():
            mono = tuple(mono)
            if list(mono) != sorted(mono, key=algebra.sort_key):
                raise ValueError(f"monomial {mono} is not in PBW order")
            if m.shape != (dim, dim):
                raise ValueError("coefficient has the wrong shape")
            if not exact.is_zero(m):
                clean[mono] = clean[mono] + m if mono in clean else m
        self.terms = clean

    # construction helpers
    @classmethod
    def scalar_matrix(cls, algebra, m: Mat, degrees=None):
        return cls(algebra, m.shape[0], {(): m}, degrees)

    @classmethod
    def generator(cls, algebra, name, dim, coeff: Mat | None = None, degrees=None):
        coeff = exact.eye(dim) if coeff is None else coeff
        return cls(algebra, dim, {(algebra.index(name),): coeff}, degrees)

    def _like(self, terms):
        return UEAElement(self.algebra, self.dim, terms, self.degrees)

    def _check(self, other):
        if other.algebra is not self.algebra or other.dim != self.dim:
            raise AlgebraMismatch("elements live over different algebras or fibers")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for mono, m in other.terms.items():
            out[mono] = out[mono] + m if mono in out else m
        return self._like(out)

    def __neg__(self):
        return self._like({k: -m for k, m in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, UEAElement):
            self._check(other)
            out: dict = {}
            for m1, a in self.terms.items():
                for m2, b in other.terms.items():
                    ab = a * b
                    if exact.is_zero(ab):
                        continue
                    for mono, coef in self.algebra.normal_word(m1 + m2):
                        term = exact.smul(coef, ab)
                        out[mono] = out[mono] + term if mono in out else term
            return self._like(out)
        if isinstance(other, Mat):
            return self._like({k: m * other for k, m in self.terms.items()})
        return self._like({k: exact.smul(other, m) for k, m in self.terms.items()})

    def __rmul__(self, other):
        if isinstance(other, Mat):
            return self._like({k: other * m for k, m in self.terms.items()})
        return self * other

    def __eq__(self, other):
        if not isinstance(other, UEAElement):
            return NotImplemented
        return (self - other).is_zero()

    def is_zero(self) -> bool:
        return not self.terms

    def with_degrees(self, degrees):
        return UEAElement(self.algebra, self.dim, self.terms, degrees)

    def render(self) -> str:
        """Stable plain-text form used by golden files."""
        if not self.terms:
            return "0"
        names = self.algebra.names
        lines = []
        for mono in sorted(self.terms, key=lambda m: (len(m), [self.algebra.sort_key(g) for g in m])):
            word = "*".join(names[g] for g in mono) or "1"
            ents = ", ".join(
                f"({i},{j}):{exact._qq_str(v.x)}{'+' if v.y >= 0 else '-'}{exact._qq_str(abs(v.y))}i"
                for i, j, v in sorted(exact.entries(self.terms[mono]), key=lambda t: t[:2])
            )
            lines.append(f"{word} :: {ents}")
        return "\n".join(lines)

    def __repr__(self):
        return f"UEAElement(dim={self.dim}, terms={len(self.terms)})"


def heisenberg_order(x: UEAElement):
    if x.is_zero():
        return NEG_INF
    return max(x.algebra.weight_of(m) for m in x.terms)


def _block_orders(x: UEAElement):
    if x.degrees is None:
        raise ValueError("graded order needs fiber degrees")
    deg = x.degrees
    for mono, m in x.terms.items():
        w = x.algebra.weight_of(mono)
        for i, j, _ in exact.entries(m):
            yield mono, i, j, w - (deg[i] - deg[j])


def graded_order(x: UEAElement):
    orders = [o for *_, o in _block_orders(x)]
    return max(orders) if orders else NEG_INF


def cosymbol(x: UEAElement, l: int, graded: bool = False) -> UEAElement:
    """Terms of (graded) Heisenberg order exactly ``l``."""
    order = graded_order(x) if graded else heisenberg_order(x)
    if order > l:
        raise OrderExceeded(f"element has order {order} > {l}")
    if not graded:
        return x._like({m: c for m, c in x.terms.items() if x.algebra.weight_of(m) == l})
    keep: dict = {}
    for mono, i, j, o in _block_orders(x):
        if o == l:
            keep.setdefault(mono, {})[(i, j)] = x.terms[mono][i, j].element
    return x._like({mono: exact.from_dict(e, (x.dim, x.dim)) for mono, e in keep.items()})


def heisenberg_algebra(n: int = 1) -> WeightedAlgebra:
    """Contact framing ``[Q_j, P_k] = delta_jk T`` with weights 1, 1, 2."""
    names = tuple(f"Q{j + 1}" for j in range(n)) + tuple(f"P{j + 1}" for j in range(n)) + ("T",)
    if n == 1:
        names = ("Q", "P", "T")
    weights = (1,) * (2 * n) + (2,)
    brackets = {(j, n + j): {2 * n: 1} for j in range(n)}
    return WeightedAlgebra(names, weights, brackets)


def su2_algebra() -> WeightedAlgebra:
    """``[X,Y]=2T, [Y,T]=2X, [T,X]=2Y`` with every weight 1 (not filtered)."""
    return WeightedAlgebra(
        ("X", "Y", "T"), (1, 1, 1), {(0, 1): {2: 2}, (1, 2): {0: 2}, (2, 0): {1: 2}}, filtered=False
    )
