"""Sparse exterior algebra on an n-dimensional coframe.

A :class:`KForm` stores the coefficients of a k-form in the basis
``e^{i1} ∧ ... ∧ e^{ik}`` with strictly increasing, zero-based indices.
Coefficients are either exact (``int``/``Fraction``) or ``float``.  Mixing the
two promotes the result to float, and :attr:`KForm.exact` then reports
``False`` so downstream verdicts can say whether they are exact.

Evaluation convention: ``(a ∧ b)(X, Y) = a(X) b(Y) - a(Y) b(X)``, i.e. the
determinant convention without 1/k! factors, so ``e^{12}(e_1, e_2) = 1``.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from numbers import Number
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple

import numpy as np

Index = Tuple[int, ...]

__all__ = [
    "KForm",
    "QSqrt2",
    "SQRT2",
    "Signature",
    "wedge",
    "interior",
    "hodge_star",
    "kn_product",
    "perm_sign",
    "sort_with_sign",
    "is_exact_scalar",
    "to_scalar",
    "parse_form",
]


class QSqrt2:
    """Exact element ``a + b*sqrt(2)`` of the quadratic field Q(sqrt 2)."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @staticmethod
    def _lift(x) -> "QSqrt2":
        if isinstance(x, QSqrt2):
            return x
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return QSqrt2(x, 0)
        return NotImplemented

    def __add__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return float(self) + o
        return QSqrt2(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt2(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return NotImplemented
        return QSqrt2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    def __rmul__(self, o):
        o2 = self._lift(o)
        if o2 is NotImplemented:
            return float(self) * o
        return self * o2

    def __truediv__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return NotImplemented
        n = o.a * o.a - 2 * o.b * o.b
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 2)")
        return self * QSqrt2(o.a / n, -o.b / n)

    def __rtruediv__(self, o):
        return self._lift(o) / self

    def __eq__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return False
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b)) if self.b else hash(self.a)

    def __float__(self):
        return float(self.a) + float(self.b) * 2 ** 0.5

    def __abs__(self):
        return abs(float(self))

    def simplify(self):
        return self.a if self.b == 0 else self

    def __repr__(self):
        return f"({self.a}+{self.b}*sqrt2)" if self.b else str(self.a)


SQRT2 = QSqrt2(0, 1)


def is_exact_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, QSqrt2)) and not isinstance(x, bool)


def to_scalar(x):
    """Normalize a coefficient: ints become Fractions, numpy floats become float."""
    if isinstance(x, bool):
        raise TypeError("bool is not a valid coefficient")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, QSqrt2):
        return x.simplify()
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, np.integer):
        return Fraction(int(x))
    if isinstance(x, Number):
        raise TypeError(f"unsupported coefficient type {type(x).__name__}")
    raise TypeError(f"unsupported coefficient type {type(x).__name__}")


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (0 if an entry repeats)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    # count inversions; sequences here are short
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def sort_with_sign(seq: Sequence[int]) -> Tuple[int, Index]:
    s = perm_sign(seq)
    return s, tuple(sorted(seq))


class KForm:
    """Immutable sparse k-form on a frame of dimension ``dim``."""

    __slots__ = ("_dim", "_deg", "_c", "_exact")

    def __init__(self, dim: int, degree: int, coeffs: Mapping[Iterable[int], object] | None = None):
        if dim < 0 or degree < 0:
            raise ValueError(f"invalid degree {degree} for dimension {dim}")
        if degree > dim and coeffs:
            if any(to_scalar(v) != 0 for v in coeffs.values()):
                raise ValueError(f"degree {degree} exceeds dimension {dim}")
        self._dim = int(dim)
        self._deg = int(degree)
        c: Dict[Index, object] = {}
        exact = True
        for idx, val in (coeffs or {}).items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != degree:
                raise ValueError(f"multi-index {idx} has wrong length for degree {degree}")
            if any(i < 0 or i >= dim for i in idx):
                raise ValueError(f"multi-index {idx} out of range for dimension {dim}")
            s, key = sort_with_sign(idx)
            if s == 0:
                continue
            val = to_scalar(val)
            c[key] = c.get(key, 0) + s * val
        out = {}
        for k, v in c.items():
            if v != 0:
                out[k] = v
                if not is_exact_scalar(v):
                    exact = False
        self._c = out
        self._exact = exact

    # -- construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, dim: int, degree: int) -> "KForm":
        return cls(dim, degree)

    @classmethod
    def scalar(cls, dim: int, value=1) -> "KForm":
        return cls(dim, 0, {(): value})

    @classmethod
    def basis(cls, dim: int, *idx: int, coeff=1) -> "KForm":
        """The form ``coeff * e^{idx[0]} ∧ ... `` with zero-based indices."""
        return cls(dim, len(idx), {tuple(idx): coeff})

    @classmethod
    def volume(cls, dim: int) -> "KForm":
        return cls.basis(dim, *range(dim))

    @classmethod
    def one_form(cls, values: Sequence) -> "KForm":
        return cls(len(values), 1, {(i,): v for i, v in enumerate(values)})

    # -- accessors ------------------------------------------------------------
    @property
    def dim(self) -> int:
        return self._dim

    @property
    def degree(self) -> int:
        return self._deg

    @property
    def exact(self) -> bool:
        """True when every coefficient is an exact rational."""
        return self._exact

    @property
    def coeffs(self) -> Dict[Index, object]:
        return dict(self._c)

    def items(self) -> Iterator[Tuple[Index, object]]:
        return iter(sorted(self._c.items()))

    def __getitem__(self, idx: Iterable[int]):
        s, key = sort_with_sign(tuple(idx))
        if s == 0:
            return Fraction(0)
        return s * self._c.get(key, Fraction(0))

    def __len__(self) -> int:
        return len(self._c)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs() <= tol

    def max_abs(self) -> float:
        if not self._c:
            return 0.0
        return max(abs(float(v)) for v in self._c.values())

    # -- arithmetic -----------------------------------------------------------
    def _check(self, other: "KForm"):
        if not isinstance(other, KForm):
            raise TypeError("expected a KForm")
        if other._dim != self._dim:
            raise ValueError(f"dimension mismatch: {self._dim} vs {other._dim}")

    def __add__(self, other: "KForm") -> "KForm":
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        self._check(other)
        if other._deg != self._deg:
            raise ValueError(f"degree mismatch: {self._deg} vs {other._deg}")
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c.get(k, 0) + v
        return KForm(self._dim, self._deg, c)

    __radd__ = __add__

    def __neg__(self) -> "KForm":
        return KForm(self._dim, self._deg, {k: -v for k, v in self._c.items()})

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def __mul__(self, s) -> "KForm":
        if isinstance(s, KForm):
            return wedge(self, s)
        s = to_scalar(s)
        return KForm(self._dim, self._deg, {k: s * v for k, v in self._c.items()})

    def __rmul__(self, s) -> "KForm":
        return self.__mul__(s)

    def __truediv__(self, s) -> "KForm":
        s = to_scalar(s)
        return KForm(self._dim, self._deg, {k: v / s for k, v in self._c.items()})

    def __xor__(self, other: "KForm") -> "KForm":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self._c
        if not isinstance(other, KForm):
            return NotImplemented
        return (self._dim, self._deg, self._c) == (other._dim, other._deg, other._c)

    def __hash__(self):
        return hash((self._dim, self._deg, frozenset(self._c.items())))

    def to_float(self) -> "KForm":
        return KForm(self._dim, self._deg, {k: float(v) for k, v in self._c.items()})

    def map_coeffs(self, fn) -> "KForm":
        return KForm(self._dim, self._deg, {k: fn(v) for k, v in self._c.items()})

    def embed(self, dim: int, offset: int = 0) -> "KForm":
        """Same form viewed in a larger frame (indices shifted by ``offset``)."""
        return KForm(dim, self._deg, {tuple(i + offset for i in k): v for k, v in self._c.items()})

    def restrict(self, keep: Sequence[int]) -> "KForm":
        """Drop every term containing an index outside ``keep`` (no reindexing)."""
        ks = set(keep)
        return KForm(self._dim, self._deg, {k: v for k, v in self._c.items() if set(k) <= ks})

    def evaluate(self, *vectors: Sequence) -> object:
        """Evaluate on ``degree`` frame-component vectors."""
        if len(vectors) != self._deg:
            raise ValueError(f"need {self._deg} vectors")
        total = 0
        for idx, v in self._c.items():
            m = [[vec[i] for i in idx] for vec in vectors]
            total += v * _det(m)
        return total

    def on_basis(self, *idx: int):
        """Value on frame vectors ``e_{idx}`` (zero-based)."""
        return self[idx]

    def dense(self) -> np.ndarray:
        """Fully antisymmetric dense array with float entries."""
        arr = np.zeros((self._dim,) * self._deg)
        for idx, v in self._c.items():
            for perm in itertools.permutations(range(self._deg)):
                arr[tuple(idx[p] for p in perm)] = perm_sign(perm) * float(v)
        return arr

    def __repr__(self) -> str:
        return f"KForm(dim={self._dim}, deg={self._deg}, {self.pretty()})"

    def pretty(self, one_based: bool = True) -> str:
        if not self._c:
            return "0"
        parts = []
        off = 1 if one_based else 0
        for idx, v in self.items():
            name = "e" + ("^" + ",".join(str(i + off) for i in idx) if idx else "")
            if not idx:
                name = "1"
            if self._dim <= 9 and idx:
                name = "e" + "".join(str(i + off) for i in idx)
            parts.append(f"{_fmt(v)}*{name}")
        return " + ".join(parts).replace("+ -", "- ")


def _fmt(v) -> str:
    if isinstance(v, (Fraction, QSqrt2)):
        return str(v)
    return repr(float(v))


def _det(m):
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        if m[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * _det(minor)
    return total


def wedge(a: KForm, b: KForm) -> KForm:
    """Exterior product ``a ∧ b``."""
    if not isinstance(a, KForm) or not isinstance(b, KForm):
        raise TypeError("wedge expects two KForms")
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.degree + b.degree > a.dim:
        return KForm(a.dim, a.degree + b.degree)
    out: Dict[Index, object] = {}
    for i, x in a._c.items():
        si = set(i)
        for j, y in b._c.items():
            if si.intersection(j):
                continue
            s, key = sort_with_sign(i + j)
            out[key] = out.get(key, 0) + s * x * y
    return KForm(a.dim, a.degree + b.degree, out)


def interior(v: int | Sequence, a: KForm) -> KForm:
    """Contraction ``v ⌟ a`` into the first slot.

    ``v`` is either a zero-based frame index or a full component vector.
    """
    if a.degree == 0:
        raise ValueError("interior product of a 0-form is undefined")
    if isinstance(v, (int, np.integer)):
        comps = {int(v): Fraction(1)}
    else:
        if len(v) != a.dim:
            raise ValueError("vector has wrong dimension")
        comps = {i: to_scalar(x) for i, x in enumerate(v) if x != 0}
    out: Dict[Index, object] = {}
    for idx, c in a._c.items():
        for pos, i in enumerate(idx):
            if i in comps:
                rest = idx[:pos] + idx[pos + 1:]
                out[rest] = out.get(rest, 0) + (-1) ** pos * comps[i] * c
    return KForm(a.dim, a.degree - 1, out)


class Signature:
    """Diagonal ±1 metric on the frame; orientation e^1∧...∧e^n is positive."""

    __slots__ = ("diag",)

    def __init__(self, diag: Sequence[int]):
        d = tuple(int(x) for x in diag)
        if any(x not in (1, -1) for x in d):
            raise ValueError("signature entries must be +1 or -1")
        self.diag = d

    @classmethod
    def euclidean(cls, n: int) -> "Signature":
        return cls([1] * n)

    @property
    def dim(self) -> int:
        return len(self.diag)

    @property
    def det_sign(self) -> int:
        s = 1
        for x in self.diag:
            s *= x
        return s

    @property
    def counts(self) -> Tuple[int, int]:
        return (sum(1 for x in self.diag if x > 0), sum(1 for x in self.diag if x < 0))

    def __repr__(self):
        return f"Signature{self.counts}"

    def __eq__(self, other):
        return isinstance(other, Signature) and self.diag == other.diag

    def __hash__(self):
        return hash(self.diag)


def hodge_star(a: KForm, sig: Signature | None = None, orientation: int = 1) -> KForm:
    """Hodge dual with ``α ∧ *β = <α, β> vol``.

    ``vol = orientation * e^{1...n}``; the default orientation is e^1∧...∧e^n.
    """
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    n = a.dim
    if sig is None:
        sig = Signature.euclidean(n)
    if sig.dim != n:
        raise ValueError("signature dimension mismatch")
    out: Dict[Index, object] = {}
    full = set(range(n))
    for idx, c in a._c.items():
        comp = tuple(sorted(full.difference(idx)))
        norm = 1
        for i in idx:
            norm *= sig.diag[i]
        out[comp] = orientation * c * norm * perm_sign(idx + comp)
    return KForm(n, n - a.degree, out)


def kn_product(h, k, strict: bool = True) -> np.ndarray:
    """Kulkarni–Nomizu product of two rank-2 tensors (square arrays).

    ``(h⊘k)(X,Y,Z,V) = h(X,Z)k(Y,V) + h(Y,V)k(X,Z) - h(Y,Z)k(X,V) - h(X,V)k(Y,Z)``.
    Object arrays of Fractions stay exact.  ``strict=False`` skips the
    symmetry-type check and just evaluates the four-term formula.
    """
    h = np.asarray(h, dtype=object if _is_obj(h) else float)
    k = np.asarray(k, dtype=object if _is_obj(k) else float)
    if h.ndim != 2 or k.ndim != 2 or h.shape != k.shape or h.shape[0] != h.shape[1]:
        raise ValueError("kn_product expects two square rank-2 tensors of equal size")
    sym_h = _symmetry(h)
    sym_k = _symmetry(k)
    if strict and (sym_h is None or sym_k is None or sym_h != sym_k):
        if not (_all_zero(h) or _all_zero(k)):
            raise ValueError("kn_product expects both symmetric or both antisymmetric tensors")
    t1 = np.einsum("xz,yv->xyzv", h, k)
    t2 = np.einsum("yv,xz->xyzv", h, k)
    t3 = np.einsum("yz,xv->xyzv", h, k)
    t4 = np.einsum("xv,yz->xyzv", h, k)
    return t1 + t2 - t3 - t4


def _is_obj(a) -> bool:
    arr = np.asarray(a)
    return arr.dtype == object or np.issubdtype(arr.dtype, np.integer)


def _all_zero(a) -> bool:
    return all(x == 0 for x in np.asarray(a).flat)


def _symmetry(a):
    if all(x == 0 for x in (a - a.T).flat):
        return "sym"
    if all(x == 0 for x in (a + a.T).flat):
        return "skew"
    return None


_TERM = re.compile(
    r"\s*([+-])?\s*(\d+(?:/\d+)?(?:\.\d*)?)?\s*\*?\s*"
    r"((?:e\^?\{?\d+\}?\s*(?:\^|∧)?\s*)+|1(?![\d/]))"
)


def parse_form(dim: int, text: str) -> KForm:
    """Parse a form such as ``"2 e12 + 2 e34 - 1/2 e67"`` (one-based indices).

    Compact names ``e12`` split into single digits; explicit products such as
    ``e^1 e^10`` or ``e^{1}∧e^{2}`` are accepted for larger frames.  ``0`` is
    the zero form of degree given by the first term, or degree 0 if none.
    """
    s = text.strip()
    if s in ("", "0"):
        return KForm(dim, 0)
    pos = 0
    terms = []
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse form near: {s[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        body = m.group(3).strip()
        if body == "1":
            idx: Tuple[int, ...] = ()
        else:
            idx = _parse_indices(body)
        terms.append((tuple(i - 1 for i in idx), sign * coeff))
        pos = m.end()
    degs = {len(i) for i, _ in terms}
    if len(degs) != 1:
        raise ValueError(f"mixed degrees in {text!r}")
    out: Dict[Index, Fraction] = {}
    for idx, c in terms:
        if any(i < 0 or i >= dim for i in idx):
            raise ValueError(f"index out of range in {text!r}")
        s_, key = sort_with_sign(idx)
        if s_ == 0:
            continue
        out[key] = out.get(key, 0) + s_ * c
    return KForm(dim, degs.pop(), out)


def _parse_indices(body: str) -> Tuple[int, ...]:
    pieces = re.findall(r"e(\^?)\{?(\d+)\}?", body)
    idx = []
    for caret, digits in pieces:
        if caret or "{" in body:
            idx.append(int(digits))
        else:
            idx.extend(int(ch) for ch in digits)
    return tuple(idx)
