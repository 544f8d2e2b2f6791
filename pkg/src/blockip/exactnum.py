"""Exact rationals, symbolic infinitesimals and small dense linear algebra.

Every scalar in the solve path is a ``gmpy2.mpq``.  Quantities that depend on
data a solver may only compare (objective entries, Lagrange multipliers) are
carried as :class:`Affine` forms; infinitesimals ``eps_0 >> eps_1 >> ...``
appear as :class:`EpsId` keys with lexicographic sign semantics.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import gmpy2

Rat = gmpy2.mpq
_MPQ = type(gmpy2.mpq(0))
ZERO = gmpy2.mpq(0)
ONE = gmpy2.mpq(1)


def rat(value) -> "gmpy2.mpq":
    """Coerce ints, strings ("p/q" or "p") and rationals to ``mpq``."""
    if isinstance(value, _MPQ):
        return value
    if isinstance(value, str):
        text = value.strip()
        if not text or text.lower() in {"inf", "+inf", "-inf", "nan", "infinity"}:
            raise ValueError(f"not a finite rational: {value!r}")
        return gmpy2.mpq(text)
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass 'p/q' strings")
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    return gmpy2.mpq(value)


def format_rat(value) -> str:
    """Serialise as ``"p"`` or ``"p/q"`` (bit-exact round trip through :func:`rat`)."""
    q = rat(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def sign(value) -> int:
    return (value > 0) - (value < 0)


@dataclass(frozen=True, order=True)
class EpsId:
    """Symbolic infinitesimal; a larger depth is infinitesimally smaller."""

    depth: int

    def __repr__(self) -> str:
        return f"eps{self.depth}"


class EpsValue:
    """``constant + sum coeff * eps`` compared lexicographically."""

    __slots__ = ("constant", "eps")

    def __init__(self, constant=ZERO, eps: dict | None = None):
        self.constant = rat(constant)
        self.eps = {k: rat(v) for k, v in (eps or {}).items() if v != 0}

    def _pair(self, other):
        if isinstance(other, EpsValue):
            return other
        return EpsValue(other)

    def __add__(self, other):
        other = self._pair(other)
        eps = dict(self.eps)
        for k, v in other.eps.items():
            eps[k] = eps.get(k, ZERO) + v
        return EpsValue(self.constant + other.constant, eps)

    __radd__ = __add__

    def __neg__(self):
        return EpsValue(-self.constant, {k: -v for k, v in self.eps.items()})

    def __sub__(self, other):
        return self + (-self._pair(other))

    def __rsub__(self, other):
        return self._pair(other) - self

    def __mul__(self, other):
        if isinstance(other, EpsValue):
            if self.eps and other.eps:
                raise ValueError("product of two infinitesimal-bearing values")
            if self.eps:
                return self * other.constant
            return other * self.constant
        k = rat(other)
        return EpsValue(self.constant * k, {d: v * k for d, v in self.eps.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._pair(other)
        return self.constant == other.constant and self.eps == other.eps

    def __hash__(self):
        return hash((self.constant, frozenset(self.eps.items())))

    def __lt__(self, other):
        return lex_sign(self - other) < 0

    def __le__(self, other):
        return lex_sign(self - other) <= 0

    def __repr__(self):
        parts = [format_rat(self.constant)]
        for k in sorted(self.eps):
            parts.append(f"{format_rat(self.eps[k])}*{k!r}")
        return "EpsValue(" + " + ".join(parts) + ")"


def _eps_sign(eps: dict) -> int:
    for key in sorted(eps):
        s = sign(eps[key])
        if s:
            return s
    return 0


def lex_sign(value) -> int:
    """Sign under eps_0 >> eps_1 >> ... >> 0 (constant dominates)."""
    if isinstance(value, EpsValue):
        s = sign(value.constant)
        return s if s else _eps_sign(value.eps)
    if isinstance(value, Affine):
        if value.terms:
            raise ValueError("sign of a form with unresolved variables")
        s = sign(value.const)
        return s if s else _eps_sign(value.eps)
    return sign(value)


class Affine:
    """Affine form ``sum terms[v] * v + const + sum eps[e] * e``.

    ``terms`` holds the variables a linear algorithm may not read directly;
    ``eps`` holds infinitesimal coefficients keyed by :class:`EpsId`.
    Instances are treated as immutable.
    """

    __slots__ = ("terms", "const", "eps")

    def __init__(self, terms=None, const=ZERO, eps=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}
        self.const = rat(const)
        self.eps = {k: v for k, v in (eps or {}).items() if v != 0}

    @classmethod
    def _raw(cls, terms, const, eps):
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.const = const
        obj.eps = eps
        return obj

    @classmethod
    def var(cls, key, coeff=ONE) -> "Affine":
        return cls._raw({key: rat(coeff)}, ZERO, {})

    @classmethod
    def constant(cls, value) -> "Affine":
        if isinstance(value, Affine):
            return value
        if isinstance(value, EpsValue):
            return cls._raw({}, value.constant, dict(value.eps))
        return cls._raw({}, rat(value), {})

    @classmethod
    def infinitesimal(cls, eps_id: EpsId, coeff=ONE) -> "Affine":
        return cls._raw({}, ZERO, {eps_id: rat(coeff)})

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Affine):
            if isinstance(other, EpsValue):
                other = Affine.constant(other)
            else:
                return Affine._raw(self.terms, self.const + other, self.eps)
        terms = _merge(self.terms, other.terms, 1)
        eps = _merge(self.eps, other.eps, 1) if other.eps else self.eps
        return Affine._raw(terms, self.const + other.const, eps)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Affine):
            if isinstance(other, EpsValue):
                other = Affine.constant(other)
            else:
                return Affine._raw(self.terms, self.const - other, self.eps)
        terms = _merge(self.terms, other.terms, -1)
        eps = _merge(self.eps, other.eps, -1) if other.eps else self.eps
        return Affine._raw(terms, self.const - other.const, eps)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Affine._raw({k: -v for k, v in self.terms.items()}, -self.const,
                           {k: -v for k, v in self.eps.items()})

    def __mul__(self, k):
        if isinstance(k, (Affine, EpsValue)):
            raise TypeError("Affine forms only scale by rationals")
        if k == 0:
            return Affine._raw({}, ZERO, {})
        if k == 1:
            return self
        return Affine._raw({v: c * k for v, c in self.terms.items()}, self.const * k,
                           {e: c * k for e, c in self.eps.items()})

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (ONE / rat(k))

    # inspection -------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms and not self.eps and self.const == 0

    def is_constant(self) -> bool:
        return not self.terms

    def offset(self) -> EpsValue:
        return EpsValue(self.const, self.eps)

    def without_eps(self) -> "Affine":
        return Affine._raw(self.terms, self.const, {})

    def key(self):
        return (frozenset(self.terms.items()), self.const, frozenset(self.eps.items()))

    def __eq__(self, other):
        if not isinstance(other, Affine):
            other = Affine.constant(other)
        return self.terms == other.terms and self.const == other.const and self.eps == other.eps

    def __hash__(self):
        return hash(self.key())

    def evaluate(self, binding) -> EpsValue:
        """Substitute rational values for every variable."""
        total = self.const
        for k, v in self.terms.items():
            try:
                total += v * binding[k]
            except KeyError:
                raise UnboundVariable(k) from None
        return EpsValue(total, self.eps)

    def substitute(self, mapping) -> "Affine":
        """Replace variables found in ``mapping`` by forms (or rationals)."""
        out = Affine._raw({}, self.const, dict(self.eps))
        keep = {}
        for k, v in self.terms.items():
            if k in mapping:
                out = out + mapping[k] * v
            else:
                keep[k] = v
        if keep:
            out = out + Affine._raw(keep, ZERO, {})
        return out

    def split(self, keys) -> tuple[dict, "Affine"]:
        """Separate coefficients of ``keys`` from the rest of the form."""
        picked, rest = {}, {}
        for k, v in self.terms.items():
            if k in keys:
                picked[k] = v
            else:
                rest[k] = v
        return picked, Affine._raw(rest, self.const, self.eps)

    def __repr__(self):
        parts = [f"{format_rat(v)}*{k!r}" for k, v in self.terms.items()]
        parts.append(format_rat(self.const))
        parts += [f"{format_rat(v)}*{k!r}" for k, v in sorted(self.eps.items())]
        return "Affine(" + " + ".join(parts) + ")"


def _merge(a: dict, b: dict, s: int) -> dict:
    if not b:
        return a
    out = dict(a)
    if s > 0:
        for k, v in b.items():
            nv = out.get(k, ZERO) + v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
    else:
        for k, v in b.items():
            nv = out.get(k, ZERO) - v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
    return out


class UnboundVariable(KeyError):
    pass


def is_zero(value) -> bool:
    if isinstance(value, (Affine,)):
        return value.is_zero()
    if isinstance(value, EpsValue):
        return value.constant == 0 and not value.eps
    return value == 0


def dot(coeffs: Sequence, values: Sequence):
    """``sum coeffs[i] * values[i]`` where values may be forms."""
    total = ZERO
    for a, v in zip(coeffs, values):
        if a:
            total = v * a + total
    return total


# ---------------------------------------------------------------------------
# Gaussian elimination
# ---------------------------------------------------------------------------

@dataclass
class Solution:
    x: list
    rank: int
    free: list


class Inconsistent(Exception):
    pass


def _row_reduce(rows: Sequence[Sequence], rhs: Sequence | None, ncols: int):
    """Incremental RREF; pivot = first nonzero column of each reduced row, rows in order."""
    piv_rows: list[list] = []
    piv_rhs: list = []
    piv_cols: list[int] = []
    for idx, row in enumerate(rows):
        r = [rat(v) for v in row]
        b = rhs[idx] if rhs is not None else None
        for pr, pb, pc in zip(piv_rows, piv_rhs, piv_cols):
            f = r[pc]
            if f:
                for j in range(ncols):
                    if pr[j]:
                        r[j] -= f * pr[j]
                if b is not None:
                    b = b - pb * f
        col = next((j for j in range(ncols) if r[j]), None)
        if col is None:
            if b is not None and not is_zero(b):
                raise Inconsistent(idx)
            continue
        p = r[col]
        r = [v / p for v in r]
        if b is not None:
            b = b * (ONE / p)
        for k, (pr, pc) in enumerate(zip(piv_rows, piv_cols)):
            f = pr[col]
            if f:
                for j in range(ncols):
                    if r[j]:
                        pr[j] -= f * r[j]
                if b is not None:
                    piv_rhs[k] = piv_rhs[k] - b * f
        piv_rows.append(r)
        piv_rhs.append(b)
        piv_cols.append(col)
    return piv_rows, piv_rhs, piv_cols


def gauss_particular_solution(M: Sequence[Sequence], rhs: Sequence, ncols: int | None = None):
    """Solve ``M x = rhs`` with free variables zero; returns None when inconsistent.

    ``rhs`` entries may be rationals, :class:`EpsValue` or :class:`Affine`.
    """
    if ncols is None:
        ncols = len(M[0]) if M else 0
    try:
        _, prhs, pcols = _row_reduce(M, rhs, ncols)
    except Inconsistent:
        return None
    x = [ZERO] * ncols
    for b, c in zip(prhs, pcols):
        x[c] = b
    free = [j for j in range(ncols) if j not in set(pcols)]
    return Solution(x=x, rank=len(pcols), free=free)


def rank(M: Sequence[Sequence], ncols: int | None = None) -> int:
    if ncols is None:
        ncols = len(M[0]) if M else 0
    return len(_row_reduce(M, None, ncols)[2])


def transpose(M: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    if not M:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*M)]


def solve_left(M: Sequence[Sequence], a: Sequence, ncols: int) -> list | None:
    """Return y with ``y^T M = a`` (a in the row space of M), else None."""
    if not M:
        return [] if all(v == 0 for v in a) else None
    sol = gauss_particular_solution(transpose(M), list(a), len(M))
    return None if sol is None else sol.x


def nullspace_vector(M: Sequence[Sequence], ncols: int) -> list | None:
    """A nonzero kernel vector of M (first free column set to 1), or None."""
    piv_rows, _, piv_cols = _row_reduce(M, None, ncols)
    free = [j for j in range(ncols) if j not in set(piv_cols)]
    if not free:
        return None
    f = free[0]
    x = [ZERO] * ncols
    x[f] = ONE
    for row, c in zip(piv_rows, piv_cols):
        x[c] = -row[f]
    return x


def matvec(M: Sequence[Sequence], x: Sequence) -> list:
    return [dot(row, x) for row in M]


def as_rat_vector(values: Iterable) -> tuple:
    return tuple(rat(v) for v in values)
