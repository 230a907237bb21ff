"""Dense exterior algebra over Euclidean R^dim.

A degree-p alternating form is stored as the vector of its values on strictly
increasing index tuples, in lexicographic order.  Evaluation on arbitrary
arguments is recovered through permutation signs.  Conventions:

* wedge is the shuffle sum, no factorial normalisation:
  (a ^ b)(X_1..X_{p+q}) = sum over (p,q)-shuffles s of sgn(s) a(...) b(...);
* the inner product of two p-forms is the sum over increasing tuples of
  products of coefficients, i.e. (1/p!) times the full tensor contraction;
* the Hodge star is defined by  psi ^ *a = <psi, a> Vol  for every psi of the
  same degree as a, where Vol is the chosen unit volume form.

Mixed tensors with one covariant slot followed by an alternating part are kept
as one coefficient row per first-slot basis vector.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


class DegreeError(ValueError):
    """Raised when form degrees do not fit the requested operation."""


# ---------------------------------------------------------------------------
# combinatorial tables (independent of any quaternionic structure)
# ---------------------------------------------------------------------------


class FormTables:
    """Index tables for increasing tuples of a fixed dimension.

    Everything here is pure combinatorics of subsets of {0..dim-1}; the tables
    are built lazily per degree and shared process-wide through ``tables``.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self._tuples: dict[int, tuple[tuple[int, ...], ...]] = {}
        self._index: dict[int, dict[tuple[int, ...], int]] = {}
        self._exp: dict[int, tuple[np.ndarray, ...]] = {}
        self._wedge: dict[tuple[int, int], tuple[np.ndarray, ...]] = {}
        self._hodge: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._der: dict[int, tuple[np.ndarray, ...]] = {}
        self._dense: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._alt5: tuple[np.ndarray, ...] | None = None
        self._c12: tuple[np.ndarray, ...] | None = None

    def nforms(self, p: int) -> int:
        return math.comb(self.dim, p)

    def tuples(self, p: int):
        if p not in self._tuples:
            self._tuples[p] = tuple(itertools.combinations(range(self.dim), p))
        return self._tuples[p]

    def index(self, p: int):
        if p not in self._index:
            self._index[p] = {T: i for i, T in enumerate(self.tuples(p))}
        return self._index[p]

    def exp_table(self, p: int):
        """Rows (u, m, r, t, sign): dropping position m (value r) from the
        p-tuple #u leaves the (p-1)-tuple #t, with sign (-1)^m.

        Drives interior products (accumulate into t) and one-form wedges
        (accumulate into u)."""
        if p not in self._exp:
            idx = self.index(p - 1)
            u_l, m_l, r_l, t_l, s_l = [], [], [], [], []
            for u, T in enumerate(self.tuples(p)):
                for m in range(p):
                    rest = T[:m] + T[m + 1:]
                    u_l.append(u)
                    m_l.append(m)
                    r_l.append(T[m])
                    t_l.append(idx[rest])
                    s_l.append(-1.0 if m % 2 else 1.0)
            self._exp[p] = tuple(
                np.asarray(a) for a in (u_l, m_l, r_l, t_l, s_l)
            )
        return self._exp[p]

    def wedge_table(self, p: int, q: int):
        """Rows (o, ai, bi, sign) with e_O = sum sign * e_A ^ e_B over all
        splits of the (p+q)-tuple #o into a p-part #ai and q-part #bi."""
        key = (p, q)
        if key not in self._wedge:
            ia, ib = self.index(p), self.index(q)
            o_l, a_l, b_l, s_l = [], [], [], []
            for o, O in enumerate(self.tuples(p + q)):
                for pos in itertools.combinations(range(p + q), p):
                    S = tuple(O[i] for i in pos)
                    T = tuple(O[i] for i in range(p + q) if i not in pos)
                    sign = (-1.0) ** (sum(pos) - (p * (p - 1)) // 2)
                    o_l.append(o)
                    a_l.append(ia[S])
                    b_l.append(ib[T])
                    s_l.append(sign)
            self._wedge[key] = tuple(
                np.asarray(a) for a in (o_l, a_l, b_l, s_l)
            )
        return self._wedge[key]

    def hodge_table(self, p: int):
        """(comp, sign): the increasing p-tuple #i has complement tuple
        #comp[i], and the concatenated permutation has parity sign[i]."""
        if p not in self._hodge:
            q = self.dim - p
            idx = self.index(q)
            comp = np.empty(self.nforms(p), dtype=np.int64)
            sign = np.empty(self.nforms(p))
            full = set(range(self.dim))
            for i, S in enumerate(self.tuples(p)):
                C = tuple(sorted(full - set(S)))
                comp[i] = idx[C]
                sign[i] = (-1.0) ** (sum(S) - (p * (p - 1)) // 2)
            self._hodge[p] = (comp, sign)
        return self._hodge[p]

    def der_table(self, p: int):
        """Rows (t, s, z, r, sign) so that the matrix of the slot-derivation
        b -> sum_i b(.., M X_i, ..) on degree p is
        D[t, s] += M[z, r] * sign   over all rows."""
        if p not in self._der:
            idx = self.index(p)
            t_l, s_l, z_l, r_l, g_l = [], [], [], [], []
            for ti, T in enumerate(self.tuples(p)):
                for m in range(p):
                    rest = T[:m] + T[m + 1:]
                    restset = set(rest)
                    for z in range(self.dim):
                        if z in restset:
                            continue
                        pos = sum(1 for x in rest if x < z)
                        S = rest[:pos] + (z,) + rest[pos:]
                        t_l.append(ti)
                        s_l.append(idx[S])
                        z_l.append(z)
                        r_l.append(T[m])
                        g_l.append((-1.0) ** (m - pos))
            self._der[p] = tuple(
                np.asarray(a) for a in (t_l, s_l, z_l, r_l, g_l)
            )
        return self._der[p]

    def dense_table(self, p: int):
        """(flat, sign): flat[k] are the raveled positions of the k-th
        permutation image of every increasing tuple, sign[k] its parity."""
        if p not in self._dense:
            T = np.asarray(self.tuples(p), dtype=np.int64)
            if p == 0:
                self._dense[p] = (np.zeros((1, 1), dtype=np.int64),
                                  np.ones(1))
                return self._dense[p]
            flats, signs = [], []
            for perm in itertools.permutations(range(p)):
                inv = sum(
                    1
                    for i in range(p)
                    for j in range(i + 1, p)
                    if perm[i] > perm[j]
                )
                cols = T[:, list(perm)]
                flat = np.zeros(len(T), dtype=np.int64)
                for k in range(p):
                    flat = flat * self.dim + cols[:, k]
                flats.append(flat)
                signs.append((-1.0) ** inv)
            self._dense[p] = (np.stack(flats), np.asarray(signs))
        return self._dense[p]

    def alt5_table(self):
        """Rows (o, r, t, sign) for the alternation of a mixed (1+4)-slot
        tensor into a 5-form: out[o] = sum sign * rows[r, t]."""
        if self._alt5 is None:
            idx4 = self.index(4)
            o_l, r_l, t_l, s_l = [], [], [], []
            for o, T in enumerate(self.tuples(5)):
                for m in range(5):
                    rest = T[:m] + T[m + 1:]
                    o_l.append(o)
                    r_l.append(T[m])
                    t_l.append(idx4[rest])
                    s_l.append((-1.0) ** m)
            self._alt5 = tuple(np.asarray(a) for a in (o_l, r_l, t_l, s_l))
        return self._alt5

    def c12_table(self):
        """Rows (t, r, u, sign) for the first-slot metric contraction of a
        mixed (1+4)-slot tensor: out[t] = sum sign * rows[r, u]."""
        if self._c12 is None:
            u_arr, m_arr, r_arr, t_arr, s_arr = self.exp_table(4)
            self._c12 = (t_arr, r_arr, u_arr, s_arr)
        return self._c12


@lru_cache(maxsize=None)
def tables(dim: int) -> FormTables:
    return FormTables(dim)


# ---------------------------------------------------------------------------
# alternating forms
# ---------------------------------------------------------------------------


@dataclass
class AltForm:
    """Alternating (0,p)-tensor on R^dim, dense coefficients over increasing
    tuples in lexicographic order."""

    dim: int
    degree: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        expected = math.comb(self.dim, self.degree)
        if self.coeffs.shape != (expected,):
            raise DegreeError(
                f"degree-{self.degree} form on R^{self.dim} needs "
                f"{expected} coefficients, got shape {self.coeffs.shape}"
            )

    @classmethod
    def zero(cls, dim: int, degree: int) -> "AltForm":
        return cls(dim, degree, np.zeros(math.comb(dim, degree)))

    @classmethod
    def basis(cls, dim: int, idx: tuple[int, ...]) -> "AltForm":
        """The form e^{i1} ^ ... ^ e^{ip} for an increasing tuple."""
        p = len(idx)
        c = np.zeros(math.comb(dim, p))
        c[tables(dim).index(p)[tuple(idx)]] = 1.0
        return cls(dim, p, c)

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "AltForm":
        """Read off an already-alternating dense tensor."""
        dense = np.asarray(dense, dtype=float)
        p = dense.ndim
        dim = dense.shape[0] if p else 1
        if p == 0:
            raise DegreeError("scalars are not stored as AltForm")
        tab = tables(dim)
        T = np.asarray(tab.tuples(p), dtype=np.int64)
        return cls(dim, p, dense[tuple(T[:, k] for k in range(p))])

    def dense(self) -> np.ndarray:
        """Full (0,p) tensor with all permutation images filled in."""
        flat, sign = tables(self.dim).dense_table(self.degree)
        out = np.zeros(self.dim ** self.degree)
        for k in range(flat.shape[0]):
            out[flat[k]] = sign[k] * self.coeffs
        return out.reshape((self.dim,) * self.degree)

    def __call__(self, *vectors: np.ndarray) -> float:
        if len(vectors) != self.degree:
            raise DegreeError("wrong number of arguments")
        out = self.dense()
        for v in vectors:
            out = np.tensordot(np.asarray(v, dtype=float), out, axes=(0, 0))
        return float(out)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def _like(self, coeffs: np.ndarray) -> "AltForm":
        return AltForm(self.dim, self.degree, coeffs)

    def __add__(self, other: "AltForm") -> "AltForm":
        self._check_same(other)
        return self._like(self.coeffs + other.coeffs)

    def __sub__(self, other: "AltForm") -> "AltForm":
        self._check_same(other)
        return self._like(self.coeffs - other.coeffs)

    def __neg__(self) -> "AltForm":
        return self._like(-self.coeffs)

    def __mul__(self, scalar: float) -> "AltForm":
        return self._like(self.coeffs * float(scalar))

    __rmul__ = __mul__

    def _check_same(self, other: "AltForm"):
        if self.dim != other.dim or self.degree != other.degree:
            raise DegreeError("mismatched forms")


def wedge(a: AltForm, b: AltForm) -> AltForm:
    if a.dim != b.dim:
        raise DegreeError("forms live on different spaces")
    p, q = a.degree, b.degree
    if p + q > a.dim:
        raise DegreeError(f"wedge degree {p}+{q} exceeds dimension {a.dim}")
    o, ai, bi, sign = tables(a.dim).wedge_table(p, q)
    vals = sign * a.coeffs[ai] * b.coeffs[bi]
    out = np.bincount(o, weights=vals, minlength=math.comb(a.dim, p + q))
    return AltForm(a.dim, p + q, out)


def wedge_power(a: AltForm, k: int) -> AltForm:
    out = a
    for _ in range(k - 1):
        out = wedge(out, a)
    return out


def interior(x: np.ndarray, a: AltForm) -> AltForm:
    """x-slot contraction (x 'hook' a)(...) = a(x, ...)."""
    if a.degree < 1:
        raise DegreeError("cannot contract a 0-form")
    x = np.asarray(x, dtype=float)
    u, _m, r, t, sign = tables(a.dim).exp_table(a.degree)
    vals = sign * x[r] * a.coeffs[u]
    out = np.bincount(t, weights=vals,
                      minlength=math.comb(a.dim, a.degree - 1))
    return AltForm(a.dim, a.degree - 1, out)


def wedge1(x: np.ndarray, b: AltForm) -> AltForm:
    """One-form wedge x^flat ^ b, using the same table as ``interior``."""
    if b.degree + 1 > b.dim:
        raise DegreeError("wedge degree exceeds dimension")
    x = np.asarray(x, dtype=float)
    u, _m, r, t, sign = tables(b.dim).exp_table(b.degree + 1)
    vals = sign * x[r] * b.coeffs[t]
    out = np.bincount(u, weights=vals,
                      minlength=math.comb(b.dim, b.degree + 1))
    return AltForm(b.dim, b.degree + 1, out)


def inner(a: AltForm, b: AltForm) -> float:
    if a.dim != b.dim or a.degree != b.degree:
        raise DegreeError("inner product needs equal degrees")
    return float(a.coeffs @ b.coeffs)


def hodge(a: AltForm, vol_coeff: float = 1.0) -> AltForm:
    """Star of a, relative to Vol = vol_coeff * e^0 ^ ... ^ e^{dim-1}
    (vol_coeff is +-1 for an orthonormal oriented frame)."""
    comp, sign = tables(a.dim).hodge_table(a.degree)
    out = np.zeros(math.comb(a.dim, a.dim - a.degree))
    out[comp] = vol_coeff * sign * a.coeffs
    return AltForm(a.dim, a.dim - a.degree, out)


# ---------------------------------------------------------------------------
# mixed tensors: one covariant slot + alternating part
# ---------------------------------------------------------------------------


@dataclass
class MixedTorsion:
    """Element of V* (x) Lambda^4 V*: row x holds the 4-form a(x; .,.,.,.)."""

    dim: int
    rows: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        expected = (self.dim, math.comb(self.dim, 4))
        if self.rows.shape != expected:
            raise DegreeError(
                f"mixed 4-form tensor needs row array {expected}, "
                f"got {self.rows.shape}"
            )

    @classmethod
    def zero(cls, dim: int) -> "MixedTorsion":
        return cls(dim, np.zeros((dim, math.comb(dim, 4))))

    def row(self, x: int) -> AltForm:
        return AltForm(self.dim, 4, self.rows[x].copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.rows))

    def flat(self) -> np.ndarray:
        return self.rows.reshape(-1)

    @classmethod
    def from_flat(cls, dim: int, vec: np.ndarray) -> "MixedTorsion":
        return cls(dim, np.asarray(vec, dtype=float).reshape(
            dim, math.comb(dim, 4)))

    def __add__(self, other: "MixedTorsion") -> "MixedTorsion":
        return MixedTorsion(self.dim, self.rows + other.rows)

    def __sub__(self, other: "MixedTorsion") -> "MixedTorsion":
        return MixedTorsion(self.dim, self.rows - other.rows)

    def __neg__(self) -> "MixedTorsion":
        return MixedTorsion(self.dim, -self.rows)

    def __mul__(self, scalar: float) -> "MixedTorsion":
        return MixedTorsion(self.dim, self.rows * float(scalar))

    __rmul__ = __mul__


@dataclass
class MixedTwoFormFamily:
    """Element of V* (x) Lambda^2 V*: row x kept as an antisymmetric matrix."""

    dim: int
    mats: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.mats = np.asarray(self.mats, dtype=float)
        if self.mats.shape != (self.dim, self.dim, self.dim):
            raise DegreeError("mixed 2-form tensor needs (dim,dim,dim) array")

    @classmethod
    def zero(cls, dim: int) -> "MixedTwoFormFamily":
        return cls(dim, np.zeros((dim, dim, dim)))

    @classmethod
    def from_coeff_rows(cls, dim: int, rows: np.ndarray) -> "MixedTwoFormFamily":
        tab = tables(dim)
        pairs = np.asarray(tab.tuples(2), dtype=np.int64)
        mats = np.zeros((dim, dim, dim))
        mats[:, pairs[:, 0], pairs[:, 1]] = rows
        mats[:, pairs[:, 1], pairs[:, 0]] = -rows
        return cls(dim, mats)

    def coeff_rows(self) -> np.ndarray:
        pairs = np.asarray(tables(self.dim).tuples(2), dtype=np.int64)
        return self.mats[:, pairs[:, 0], pairs[:, 1]]

    def row(self, x: int) -> AltForm:
        return AltForm.from_dense(self.mats[x])

    def norm(self) -> float:
        # rows are antisymmetric matrices; the form norm counts each pair once
        return float(np.linalg.norm(self.coeff_rows()))

    def __add__(self, other):
        return MixedTwoFormFamily(self.dim, self.mats + other.mats)

    def __sub__(self, other):
        return MixedTwoFormFamily(self.dim, self.mats - other.mats)

    def __neg__(self):
        return MixedTwoFormFamily(self.dim, -self.mats)

    def __mul__(self, scalar: float):
        return MixedTwoFormFamily(self.dim, self.mats * float(scalar))

    __rmul__ = __mul__


def contract12(a: MixedTorsion) -> AltForm:
    """First-slot metric contraction with a minus sign:
    out(y,z,u) = -sum_r a(e_r; e_r, y, z, u)."""
    t, r, u, sign = tables(a.dim).c12_table()
    vals = -sign * a.rows[r, u]
    out = np.bincount(t, weights=vals, minlength=math.comb(a.dim, 3))
    return AltForm(a.dim, 3, out)


def alternate5(a: MixedTorsion) -> AltForm:
    """Cyclic-sum alternation of the five slots into a 5-form."""
    o, r, t, sign = tables(a.dim).alt5_table()
    vals = sign * a.rows[r, t]
    out = np.bincount(o, weights=vals, minlength=math.comb(a.dim, 5))
    return AltForm(a.dim, 5, out)


def wedge22_rows(mats: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Row-wise wedge of antisymmetric-matrix 2-forms with a fixed 2-form,
    returning 4-form coefficient rows."""
    dim = omega.shape[0]
    quad = np.asarray(tables(dim).tuples(4), dtype=np.int64)
    a, b, c, d = quad[:, 0], quad[:, 1], quad[:, 2], quad[:, 3]
    M, N = mats, omega
    return (
        M[:, a, b] * N[c, d] - M[:, a, c] * N[b, d] + M[:, a, d] * N[b, c]
        + M[:, b, c] * N[a, d] - M[:, b, d] * N[a, c] + M[:, c, d] * N[a, b]
    )


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def form_to_json(a: AltForm) -> dict:
    tab = tables(a.dim)
    coeffs = {
        ",".join(map(str, T)): float(v)
        for T, v in zip(tab.tuples(a.degree), a.coeffs)
        if v != 0.0
    }
    return {"n": a.dim // 4, "degree": a.degree, "coeffs": coeffs}


def form_from_json(data: dict) -> AltForm:
    dim = 4 * int(data["n"])
    p = int(data["degree"])
    idx = tables(dim).index(p)
    out = AltForm.zero(dim, p)
    for key, v in data.get("coeffs", {}).items():
        T = tuple(int(s) for s in key.split(","))
        if len(T) != p:
            raise DegreeError(f"coefficient key {key!r} is not a {p}-tuple")
        out.coeffs[idx[T]] = float(v)
    return out


def mixed_to_json(a: MixedTorsion) -> dict:
    tab = tables(a.dim)
    coeffs = {}
    for x in range(a.dim):
        for T, v in zip(tab.tuples(4), a.rows[x]):
            if v != 0.0:
                coeffs[",".join(map(str, (x,) + T))] = float(v)
    return {"n": a.dim // 4, "degree": 4, "coeffs": coeffs}


def mixed_from_json(data: dict) -> MixedTorsion:
    dim = 4 * int(data["n"])
    idx = tables(dim).index(4)
    out = MixedTorsion.zero(dim)
    for key, v in data.get("coeffs", {}).items():
        T = tuple(int(s) for s in key.split(","))
        if len(T) != 5:
            raise DegreeError(
                f"mixed tensor key {key!r} must be (row, i, j, k, l)")
        out.rows[T[0], idx[T[1:]]] = float(v)
    return out


def load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)
