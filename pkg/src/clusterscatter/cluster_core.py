"""Seeds and mutations for cluster algebras with polynomial exchange relations.

A seed carries an exchange matrix B (skew-symmetrizable by diag(d), column i
divisible by the exchange-polynomial degree r_i), a tuple of r_i normalized
coefficients per direction living in a tropical semifield, and n cluster
variables stored as exact rational functions of the initial cluster.  On top
of seed mutation this module provides pattern walks, the c-vector block
matrices, g-vector frames with signed mutation, Y-seeds, the separation of a
cluster variable into its initial-cluster expression and coefficient
denominator, and the one-step birational pullbacks whose composition along a
mutation path reproduces cluster variables and Y-variables.

Directions k are 1-based in the public API, matching the usual edge labels
of the regular tree.  All arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd

from .monoid_ring import (
    Exponent,
    LaurentSeries,
    series_exact_div,
    series_from_json,
    series_pow,
    series_to_json,
)
from .semifield import (
    CoeffLattice,
    TropElement,
    p_minus,
    p_plus,
    trop_add,
    trop_element_from_json,
    trop_element_to_json,
)

Matrix = tuple[tuple[int, ...], ...]


class InvariantViolation(RuntimeError):
    """A structural invariant that should be unreachable failed."""


def _as_matrix(rows) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def validate_exchange_matrix(B: Matrix, d, r) -> None:
    n = len(B)
    for i in range(n):
        for j in range(n):
            if d[i] * B[i][j] + d[j] * B[j][i] != 0:
                raise ValueError(
                    f"matrix is not skew-symmetrizable by diag{tuple(d)} at ({i + 1},{j + 1})"
                )
            if B[i][j] % r[j] != 0:
                raise ValueError(f"column {j + 1} is not divisible by r_{j + 1} = {r[j]}")


def matrix_mutate(B, k: int) -> Matrix:
    """Exchange-matrix mutation in direction k."""
    B = _as_matrix(B)
    n = len(B)
    if not 1 <= k <= n:
        raise IndexError(f"direction {k} out of range 1..{n}")
    a = k - 1
    return tuple(
        tuple(
            -B[i][j]
            if i == a or j == a
            else B[i][j]
            + max(B[i][a], 0) * max(B[a][j], 0)
            - max(-B[i][a], 0) * max(-B[a][j], 0)
            for j in range(n)
        )
        for i in range(n)
    )


def _beta(B: Matrix, r, i: int, j: int) -> int:
    # b_{ij}/r_j; integral by the column-divisibility requirement
    q, rem = divmod(B[i][j], r[j])
    if rem:
        raise InvariantViolation(f"b_{i + 1}{j + 1} = {B[i][j]} not divisible by {r[j]}")
    return q


@dataclass(frozen=True)
class FixedData:
    """Exchange matrix with its skew-symmetrizer diag(d) and polynomial degrees r."""

    B: Matrix
    d: tuple[int, ...]
    r: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "B", _as_matrix(self.B))
        object.__setattr__(self, "d", tuple(int(x) for x in self.d))
        object.__setattr__(self, "r", tuple(int(x) for x in self.r))
        n = len(self.B)
        if any(len(row) != n for row in self.B):
            raise ValueError("exchange matrix must be square")
        if len(self.d) != n or len(self.r) != n:
            raise ValueError("d and r need one entry per direction")
        if any(x <= 0 for x in self.d + self.r):
            raise ValueError("d and r entries must be positive")
        if reduce(gcd, self.d) != 1:
            raise ValueError("gcd of the d_i must be 1")
        validate_exchange_matrix(self.B, self.d, self.r)

    @property
    def n(self) -> int:
        return len(self.B)

    @property
    def lattice(self) -> CoeffLattice:
        return CoeffLattice(self.r)

    def beta(self, i: int, j: int) -> int:
        """b_{ij}/r_j of the initial matrix (1-based)."""
        return _beta(self.B, self.r, i - 1, j - 1)

    def omega(self, u, v) -> Fraction:
        """Skew form on N in basis coordinates: omega(e_a, e_b) = b_ab/d_b."""
        tot = Fraction(0)
        for a, ua in enumerate(u):
            if not ua:
                continue
            for b, vb in enumerate(v):
                if vb:
                    tot += Fraction(ua * vb * self.B[a][b], self.d[b])
        return tot


# -- rational functions ------------------------------------------------------


@dataclass(frozen=True)
class RationalFunction:
    """Quotient of two exact Laurent polynomials over the coefficient group."""

    num: LaurentSeries
    den: LaurentSeries

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return rational(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        return rational(self.num * other.den, self.den * other.num)

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return rational(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return rational(self.num * other.den - other.num * self.den, self.den * other.den)

    def __pow__(self, e: int) -> "RationalFunction":
        if e < 0:
            return rational(series_pow(self.den, -e), series_pow(self.num, -e))
        return rational(series_pow(self.num, e), series_pow(self.den, e))

    def inv(self) -> "RationalFunction":
        return rational(self.den, self.num)

    @property
    def is_laurent(self) -> bool:
        return self.den.is_one()

    @property
    def series(self) -> LaurentSeries:
        if not self.den.is_one():
            raise ValueError("rational function did not reduce to a Laurent polynomial")
        return self.num

    def equivalent(self, other: "RationalFunction") -> bool:
        """Equality as rational functions (cross multiplication)."""
        return self.num * other.den == other.num * self.den

    def key(self):
        """Hashable canonical key; exact only for reduced representations."""
        return (
            tuple(self.num.sorted_terms()),
            tuple(self.den.sorted_terms()),
        )

    def __str__(self) -> str:
        if self.den.is_one():
            return str(self.num)
        return f"({self.num}) / ({self.den})"


def rational(num: LaurentSeries, den: LaurentSeries) -> RationalFunction:
    """Normalize: reduce to denominator 1 whenever the division is exact."""
    if not den:
        raise ZeroDivisionError("zero denominator")
    if den.is_one():
        return RationalFunction(num, den)
    e0 = next(iter(den.terms))
    one = LaurentSeries.one(len(e0.m), len(e0.t))
    if not num:
        return RationalFunction(LaurentSeries.zero(None), one)
    q = series_exact_div(num, den)
    if q is not None:
        return RationalFunction(q, one)
    return RationalFunction(num, den)


def rf_one(n: int, d: int) -> RationalFunction:
    one = LaurentSeries.one(n, d)
    return RationalFunction(one, one)


def rf_monomial(n: int, d: int, m=None, t=None, coeff=1) -> RationalFunction:
    m = tuple(m) if m is not None else (0,) * n
    t = tuple(t) if t is not None else (0,) * d
    return RationalFunction(LaurentSeries.monomial(m, t, coeff), LaurentSeries.one(n, d))


def rf_coeff(n: int, p: TropElement) -> RationalFunction:
    """The coefficient p as a monomial of the group ring."""
    return rf_monomial(n, p.lattice.d, None, p.exponents)


# -- seeds and mutation ------------------------------------------------------


@dataclass(frozen=True)
class Seed:
    """Labeled seed: matrix, coefficient tuples, and optional cluster.

    ``semifield=True`` mutates coefficients with the normalized rule (the
    tropical splits p^+/p^-); ``semifield=False`` treats coefficients as bare
    group elements and applies the plus-signed rule used by the scattering
    frame changes.  The cluster may be None for coefficient-only patterns.
    """

    data: FixedData
    matrix: Matrix
    coeffs: tuple[tuple[TropElement, ...], ...]
    cluster: tuple[RationalFunction, ...] | None
    word: tuple[int, ...] = ()
    semifield: bool = True

    def __post_init__(self):
        object.__setattr__(self, "matrix", _as_matrix(self.matrix))
        validate_exchange_matrix(self.matrix, self.data.d, self.data.r)
        if len(self.coeffs) != self.data.n:
            raise ValueError("one coefficient tuple per direction required")
        for i, tup in enumerate(self.coeffs):
            if len(tup) != self.data.r[i]:
                raise ValueError(f"direction {i + 1} needs {self.data.r[i]} coefficients")
        if self.cluster is not None and len(self.cluster) != self.data.n:
            raise ValueError("cluster size mismatch")

    @property
    def coeff_lattice(self) -> CoeffLattice:
        return self.coeffs[0][0].lattice

    def beta(self, i: int, j: int) -> int:
        return _beta(self.matrix, self.data.r, i - 1, j - 1)


def initial_seed(
    data: FixedData,
    coeffs=None,
    lattice: CoeffLattice | None = None,
    with_cluster: bool = True,
    semifield: bool = True,
) -> Seed:
    """Seed at the basepoint.  Default coefficients are the semifield
    generators themselves (principal); pass explicit tuples for other
    coefficient patterns."""
    if coeffs is None:
        lat = lattice if lattice is not None else data.lattice
        if lat.orders != data.r:
            raise ValueError("principal coefficients require lattice blocks matching r")
        coeffs = tuple(
            tuple(lat.generator(i, j) for j in range(data.r[i])) for i in range(data.n)
        )
    else:
        coeffs = tuple(tuple(tup) for tup in coeffs)
    lat = coeffs[0][0].lattice
    cluster = None
    if with_cluster:
        cluster = tuple(
            rf_monomial(data.n, lat.d, _unit(data.n, i)) for i in range(data.n)
        )
    return Seed(data, data.B, coeffs, cluster, (), semifield)


def _unit(n: int, i: int) -> tuple[int, ...]:
    return tuple(1 if a == i else 0 for a in range(n))


def _prod_trop(items, one: TropElement) -> TropElement:
    out = one
    for x in items:
        out = out * x
    return out


def _coeffs_mutate_normalized(coeffs, B: Matrix, r, a: int):
    one = coeffs[a][0].lattice.one()
    pk_plus = _prod_trop((p_plus(p) for p in coeffs[a]), one)
    pk_minus = _prod_trop((p_minus(p) for p in coeffs[a]), one)
    out = []
    for i, tup in enumerate(coeffs):
        if i == a:
            out.append(tuple(p.inv() for p in tup))
            continue
        b_ik = _beta(B, r, i, a)
        b_ki = _beta(B, r, a, i)
        fac = (pk_minus if b_ik > 0 else pk_plus) ** b_ki
        out.append(tuple(p * fac for p in tup))
    return tuple(out)


def _coeffs_mutate_group(coeffs, B: Matrix, r, a: int, eps: int = 1):
    one = coeffs[a][0].lattice.one()
    tk = _prod_trop(coeffs[a], one)
    out = []
    for i, tup in enumerate(coeffs):
        if i == a:
            out.append(tuple(p.inv() for p in tup))
            continue
        e = max(eps * _beta(B, r, a, i), 0)
        fac = tk**e
        out.append(tuple(p * fac for p in tup))
    return tuple(out)


def _exchange_variable(s: Seed, a: int) -> RationalFunction:
    # x_k' = x_k^{-1} * prod_l (p_{k,l}^+ u_+ + p_{k,l}^- u_-)
    n = s.data.n
    r = s.data.r
    d = s.coeff_lattice.d
    u_plus = rf_one(n, d)
    u_minus = rf_one(n, d)
    for i in range(n):
        b = s.matrix[i][a]
        if b > 0:
            u_plus = u_plus * s.cluster[i] ** (b // r[a])
        elif b < 0:
            u_minus = u_minus * s.cluster[i] ** (-(b // r[a]))
    theta = rf_one(n, d)
    for p in s.coeffs[a]:
        theta = theta * (rf_coeff(n, p_plus(p)) * u_plus + rf_coeff(n, p_minus(p)) * u_minus)
    return theta / s.cluster[a]


def seed_mutate(s: Seed, k: int) -> Seed:
    """Mutation in direction k; involutive."""
    n = s.data.n
    if not 1 <= k <= n:
        raise IndexError(f"direction {k} out of range 1..{n}")
    a = k - 1
    if s.semifield:
        coeffs = _coeffs_mutate_normalized(s.coeffs, s.matrix, s.data.r, a)
    else:
        coeffs = _coeffs_mutate_group(s.coeffs, s.matrix, s.data.r, a)
    cluster = None
    if s.cluster is not None:
        entries = list(s.cluster)
        entries[a] = _exchange_variable(s, a)
        cluster = tuple(entries)
    word = s.word[:-1] if s.word and s.word[-1] == k else s.word + (k,)
    return Seed(s.data, matrix_mutate(s.matrix, k), coeffs, cluster, word, s.semifield)


def reduce_word(word) -> tuple[int, ...]:
    out: list[int] = []
    for k in word:
        if out and out[-1] == k:
            out.pop()
        else:
            out.append(int(k))
    return tuple(out)


def pattern_walk(s0: Seed, word, memo: dict | None = None) -> Seed:
    """Apply a mutation word; consecutive equal letters cancel before any
    work is done, and intermediate seeds are memoized by reduced word."""
    if memo is None:
        memo = {}
    memo.setdefault((), s0)
    stack: list[int] = []
    s = s0
    for k in word:
        if stack and stack[-1] == k:
            stack.pop()
            s = memo[tuple(stack)]
            continue
        stack.append(int(k))
        key = tuple(stack)
        hit = memo.get(key)
        if hit is None:
            hit = seed_mutate(s, k)
            memo[key] = hit
        s = hit
    return s


def seed_key(s: Seed, strict: bool = True):
    """Hashable identity of a seed; with ``strict=False`` the coefficients of
    each direction are compared as a multiset (relabeling of the tuple index)."""
    coeffs = tuple(
        tuple(p.exponents for p in tup) if strict else tuple(sorted(p.exponents for p in tup))
        for tup in s.coeffs
    )
    cluster = None
    if s.cluster is not None:
        cluster = tuple(x.key() for x in s.cluster)
    return (s.matrix, s.data.d, s.data.r, coeffs, cluster)


def seeds_equal(s1: Seed, s2: Seed, strict: bool = False) -> bool:
    return seed_key(s1, strict) == seed_key(s2, strict)


def explore_pattern(s0: Seed, depth: int) -> dict[tuple[int, ...], Seed]:
    """Breadth-first over reduced words up to the given length, keeping the
    first word that reaches each distinct labeled seed."""
    n = s0.data.n
    memo: dict[tuple[int, ...], Seed] = {(): s0}
    found: dict[tuple, tuple[int, ...]] = {seed_key(s0): ()}
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(depth):
        nxt: list[tuple[int, ...]] = []
        for w in frontier:
            s = memo[w]
            for k in range(1, n + 1):
                if w and w[-1] == k:
                    continue
                w2 = w + (k,)
                s2 = seed_mutate(s, k)
                memo[w2] = s2
                key = seed_key(s2)
                if key not in found:
                    found[key] = w2
                    nxt.append(w2)
        frontier = nxt
    return {w: memo[w] for w in found.values()}


def distinct_cluster_variables(seeds) -> list[RationalFunction]:
    out: dict = {}
    for s in seeds:
        if s.cluster is None:
            continue
        for x in s.cluster:
            out.setdefault(x.key(), x)
    return list(out.values())


# -- coefficient block matrices ----------------------------------------------


@dataclass(frozen=True)
class CMatrix:
    """Exponent columns of the coefficients: block i holds r_i columns of
    length sum(r), one per coefficient of direction i."""

    r: tuple[int, ...]
    blocks: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(int(x) for x in self.r))
        object.__setattr__(
            self, "blocks", tuple(tuple(tuple(int(x) for x in col) for col in b) for b in self.blocks)
        )
        dim = sum(self.r)
        if len(self.blocks) != len(self.r):
            raise ValueError("one block per direction required")
        for i, b in enumerate(self.blocks):
            if len(b) != self.r[i] or any(len(col) != dim for col in b):
                raise ValueError(f"block {i + 1} must be {sum(self.r)} x {self.r[i]}")

    @property
    def dim(self) -> int:
        return sum(self.r)

    def column(self, i: int, j: int) -> tuple[int, ...]:
        return self.blocks[i - 1][j - 1]

    def is_sign_coherent(self) -> bool:
        for b in self.blocks:
            for col in b:
                if any(x > 0 for x in col) and any(x < 0 for x in col):
                    return False
        return True

    def block_structure_ok(self) -> bool:
        """Off-diagonal block rows are constant; the diagonal square has a
        constant off-diagonal value c with all diagonal entries equal to c+1
        or all equal to c-1."""
        lat = CoeffLattice(self.r)
        for i, b in enumerate(self.blocks):
            for kk in range(len(self.r)):
                rows = lat.block_range(kk)
                vals = {col[a] for col in b for a in rows}
                if kk != i:
                    if len(vals) != 1:
                        return False
                else:
                    start = rows.start
                    diag = {b[j][start + j] for j in range(self.r[i])}
                    off = {
                        col[start + a]
                        for j, col in enumerate(b)
                        for a in range(self.r[i])
                        if a != j
                    }
                    if len(diag) != 1:
                        return False
                    if self.r[i] > 1 and len(off) != 1:
                        return False
                    c = off.pop() if off else None
                    v = diag.pop()
                    if c is not None and abs(v - c) != 1:
                        return False
        return True


def initial_c_matrix(r) -> CMatrix:
    lat = CoeffLattice(tuple(r))
    blocks = []
    for i in range(lat.n):
        cols = []
        for j in range(lat.orders[i]):
            col = [0] * lat.d
            col[lat.flat_index(i, j)] = 1
            cols.append(tuple(col))
        blocks.append(tuple(cols))
    return CMatrix(tuple(r), tuple(blocks))


def c_matrix_mutate(C: CMatrix, B, k: int) -> CMatrix:
    """Mutation of the coefficient exponent columns in direction k."""
    B = _as_matrix(B)
    n = len(C.r)
    if len(B) != n:
        raise ValueError("matrix size does not match block count")
    if not 1 <= k <= n:
        raise IndexError(f"direction {k} out of range 1..{n}")
    a = k - 1
    dim = C.dim
    colk = C.blocks[a]
    neg = [sum(max(-col[row], 0) for col in colk) for row in range(dim)]
    pos = [sum(max(col[row], 0) for col in colk) for row in range(dim)]
    blocks = []
    for i in range(n):
        if i == a:
            blocks.append(tuple(tuple(-x for x in col) for col in colk))
            continue
        b_ik = _beta(B, C.r, i, a)
        b_ki = _beta(B, C.r, a, i)
        base = neg if b_ik > 0 else pos
        blocks.append(
            tuple(tuple(col[row] + base[row] * b_ki for row in range(dim)) for col in C.blocks[i])
        )
    return CMatrix(C.r, tuple(blocks))


def c_matrix_of(s: Seed) -> CMatrix:
    """Read the coefficient exponents of a seed as a block matrix."""
    if s.coeff_lattice.orders != s.data.r:
        raise ValueError("seed coefficients do not live in the principal lattice")
    return CMatrix(s.data.r, tuple(tuple(p.exponents for p in tup) for tup in s.coeffs))


# -- g-vector frames ---------------------------------------------------------


def _vector_sign(v) -> int:
    has_pos = any(x > 0 for x in v)
    has_neg = any(x < 0 for x in v)
    if has_pos and has_neg:
        raise InvariantViolation(f"mixed-sign vector {tuple(v)}")
    if not has_pos and not has_neg:
        raise InvariantViolation("zero vector has no sign")
    return 1 if has_pos else -1


@dataclass(frozen=True)
class GVectorFrame:
    """The chamber frame of a vertex: rows g_i in dual coordinates, rows
    g*_i in basis coordinates, dual to each other."""

    data: FixedData
    g: tuple[tuple[int, ...], ...]
    gstar: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "g", _as_matrix(self.g))
        object.__setattr__(self, "gstar", _as_matrix(self.gstar))
        n = self.data.n
        for i in range(n):
            for j in range(n):
                pair = sum(self.gstar[i][a] * self.g[j][a] for a in range(n))
                if pair != (1 if i == j else 0):
                    raise InvariantViolation("g and g* are not dual bases")

    def epsilon(self, i: int) -> int:
        return _vector_sign(self.gstar[i - 1])

    def matrix(self) -> Matrix:
        """Exchange matrix of the frame: omega(g*_i, d_j g*_j)."""
        n = self.data.n
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                v = self.data.omega(self.gstar[i], self.gstar[j]) * self.data.d[j]
                if v.denominator != 1:
                    raise InvariantViolation("frame matrix is not integral")
                row.append(int(v))
            out.append(tuple(row))
        return tuple(out)

    def w(self, i: int) -> tuple[int, ...]:
        """Normal covector omega(-, (d_i/r_i) g*_i) in dual coordinates."""
        n = self.data.n
        scale = Fraction(self.data.d[i - 1], self.data.r[i - 1])
        out = []
        for a in range(n):
            v = self.data.omega(_unit(n, a), self.gstar[i - 1]) * scale
            if v.denominator != 1:
                raise InvariantViolation("normal covector is not integral")
            out.append(int(v))
        return tuple(out)


def initial_g_frame(data: FixedData) -> GVectorFrame:
    ident = tuple(_unit(data.n, i) for i in range(data.n))
    return GVectorFrame(data, ident, ident)


def g_frame_mutate(G: GVectorFrame, s: Seed | Matrix, k: int) -> GVectorFrame:
    """Signed mutation in direction k, with the sign read off g*_k."""
    n = G.data.n
    if not 1 <= k <= n:
        raise IndexError(f"direction {k} out of range 1..{n}")
    a = k - 1
    Bv = s.matrix if isinstance(s, Seed) else _as_matrix(s)
    eps = G.epsilon(k)
    coef = [max(-eps * Bv[i][a], 0) for i in range(n)]
    gstar = [
        tuple(-x for x in G.gstar[a])
        if i == a
        else tuple(x + coef[i] * y for x, y in zip(G.gstar[i], G.gstar[a]))
        for i in range(n)
    ]
    gk = [-x for x in G.g[a]]
    for i in range(n):
        if i != a and coef[i]:
            gk = [x + coef[i] * y for x, y in zip(gk, G.g[i])]
    g = [tuple(gk) if i == a else G.g[i] for i in range(n)]
    return GVectorFrame(G.data, tuple(g), tuple(gstar))


# -- Y-seeds -----------------------------------------------------------------


@dataclass(frozen=True)
class YSeed:
    """Y-seed: matrix, coefficient tuples, and n Y-variables as exact
    rational functions of the initial ones."""

    data: FixedData
    matrix: Matrix
    qcoeffs: tuple[tuple[TropElement, ...], ...]
    y: tuple[RationalFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "matrix", _as_matrix(self.matrix))
        validate_exchange_matrix(self.matrix, self.data.d, self.data.r)
        if len(self.qcoeffs) != self.data.n or len(self.y) != self.data.n:
            raise ValueError("Y-seed size mismatch")
        for i, tup in enumerate(self.qcoeffs):
            if len(tup) != self.data.r[i]:
                raise ValueError(f"direction {i + 1} needs {self.data.r[i]} coefficients")

    @property
    def coeff_lattice(self) -> CoeffLattice:
        return self.qcoeffs[0][0].lattice


def initial_y_seed(data: FixedData, qcoeffs=None, lattice: CoeffLattice | None = None) -> YSeed:
    if qcoeffs is None:
        lat = lattice if lattice is not None else data.lattice
        if lat.orders != data.r:
            raise ValueError("principal coefficients require lattice blocks matching r")
        qcoeffs = tuple(
            tuple(lat.generator(i, j) for j in range(data.r[i])) for i in range(data.n)
        )
    else:
        qcoeffs = tuple(tuple(tup) for tup in qcoeffs)
    lat = qcoeffs[0][0].lattice
    y = tuple(rf_monomial(data.n, lat.d, _unit(data.n, i)) for i in range(data.n))
    return YSeed(data, data.B, qcoeffs, y)


def _xcoeffs_mutate(qcoeffs, B: Matrix, r, a: int):
    # the transposed-sign rule: -B^T governs the coefficients
    one = qcoeffs[a][0].lattice.one()
    qk_plus = _prod_trop((p_plus(q) for q in qcoeffs[a]), one)
    qk_minus = _prod_trop((p_minus(q) for q in qcoeffs[a]), one)
    out = []
    for i, tup in enumerate(qcoeffs):
        if i == a:
            out.append(tuple(q.inv() for q in tup))
            continue
        b_ik = _beta(B, r, i, a)
        b_ki = _beta(B, r, a, i)
        base = qk_minus if -b_ki > 0 else qk_plus
        fac = base ** (-b_ik)
        out.append(tuple(q * fac for q in tup))
    return tuple(out)


def y_seed_mutate(ys: YSeed, k: int) -> YSeed:
    """Y-seed mutation in direction k; involutive."""
    n = ys.data.n
    if not 1 <= k <= n:
        raise IndexError(f"direction {k} out of range 1..{n}")
    a = k - 1
    r = ys.data.r
    d = ys.coeff_lattice.d
    qcoeffs = _xcoeffs_mutate(ys.qcoeffs, ys.matrix, r, a)
    ynew = []
    for i in range(n):
        if i == a:
            ynew.append(ys.y[a].inv())
            continue
        b_ik = _beta(ys.matrix, r, i, a)
        if b_ik == 0:
            ynew.append(ys.y[i])
            continue
        s = 1 if b_ik > 0 else -1
        yk_s = ys.y[a] ** s
        fac = rf_one(n, d)
        for q in ys.qcoeffs[a]:
            qs = p_plus(q) if s > 0 else p_minus(q)
            qo = p_minus(q) if s > 0 else p_plus(q)
            fac = fac * (rf_coeff(n, qs) * yk_s + rf_coeff(n, qo))
        ynew.append(ys.y[i] * fac**b_ik)
    return YSeed(ys.data, matrix_mutate(ys.matrix, k), qcoeffs, tuple(ynew))


# -- separation of a cluster variable ----------------------------------------


@dataclass(frozen=True)
class TropMap:
    """Multiplicative map of tropical semifields given on the source generators."""

    source: CoeffLattice
    target: CoeffLattice
    images: tuple[TropElement, ...]

    def __post_init__(self):
        if len(self.images) != self.source.d:
            raise ValueError("one image per source generator required")

    @staticmethod
    def identity(lat: CoeffLattice) -> "TropMap":
        return TropMap(lat, lat, tuple(lat.generators()))

    def of_exponents(self, t) -> TropElement:
        out = self.target.one()
        for b, e in enumerate(t):
            if e:
                out = out * self.images[b] ** e
        return out

    def of(self, p: TropElement) -> TropElement:
        return self.of_exponents(p.exponents)

    def on_series(self, x: LaurentSeries) -> LaurentSeries:
        """Push every coefficient monomial through the map; collisions add."""
        terms: dict[Exponent, int | Fraction] = {}
        for e, c in x.terms.items():
            e2 = Exponent(e.m, self.of_exponents(e.t).exponents)
            terms[e2] = terms.get(e2, 0) + c
        return LaurentSeries(terms, x.order)


def x_function(s0: Seed, word, l: int, memo: dict | None = None) -> RationalFunction:
    """The cluster variable at the end of the word, in initial-cluster form."""
    s = pattern_walk(s0, word, memo)
    if s.cluster is None:
        raise ValueError("pattern carries no cluster")
    if not 1 <= l <= s.data.n:
        raise IndexError(f"index {l} out of range 1..{s.data.n}")
    return s.cluster[l - 1]


def f_function(s0: Seed, word, l: int, memo: dict | None = None) -> LaurentSeries:
    """The cluster variable with every initial variable set to 1: a
    polynomial in the coefficients alone."""
    x = x_function(s0, word, l, memo).series
    n = len(next(iter(x.terms)).m) if x.terms else s0.data.n
    terms: dict[Exponent, int | Fraction] = {}
    zero_m = (0,) * n
    for e, c in x.terms.items():
        e2 = Exponent(zero_m, e.t)
        v = terms.get(e2, 0) + c
        if v:
            terms[e2] = v
        else:
            terms.pop(e2, None)
    return LaurentSeries(terms, None)


def separation_evaluate(s0: Seed, word, l: int, lam: TropMap, memo: dict | None = None) -> RationalFunction:
    """Evaluate the stored variable over another tropical semifield: push the
    initial-cluster expression through ``lam`` and divide by the tropical
    evaluation of its coefficient polynomial."""
    X = x_function(s0, word, l, memo).series
    F = f_function(s0, word, l, memo)
    Xev = lam.on_series(X)
    fval = None
    for e, _c in F.terms.items():
        v = lam.of_exponents(e.t)
        fval = v if fval is None else trop_add(fval, v)
    if fval is None:
        raise InvariantViolation("empty coefficient polynomial")
    n = len(next(iter(X.terms)).m) if X.terms else s0.data.n
    return rational(
        Xev * LaurentSeries.monomial((0,) * n, tuple(-e for e in fval.exponents)),
        LaurentSeries.one(n, lam.target.d),
    )


# -- one-step birational pullbacks and their composition ---------------------


@dataclass(frozen=True)
class ClusterMap:
    """Wall-crossing substitution z^m -> z^m * f^(sign * <normal, m>); the
    coefficient generators are fixed."""

    n: int
    d: int
    f: LaurentSeries
    normal: tuple[int, ...]
    sign: int

    def _fpow(self, e: int, cache: dict) -> LaurentSeries:
        hit = cache.get(e)
        if hit is None:
            hit = series_pow(self.f, e)
            cache[e] = hit
        return hit

    def _apply_series(self, x: LaurentSeries, cache: dict) -> tuple[LaurentSeries, int]:
        """Image as (numerator, D) meaning numerator / f^D."""
        levels: dict[int, dict[Exponent, object]] = {}
        for e, c in x.terms.items():
            lv = self.sign * sum(self.normal[a] * e.m[a] for a in range(self.n))
            levels.setdefault(lv, {})[e] = c
        if not levels:
            return LaurentSeries.zero(None), 0
        D = max(0, -min(levels))
        out = LaurentSeries.zero(None)
        for lv, terms in levels.items():
            out = out + LaurentSeries(terms, None) * self._fpow(lv + D, cache)
        return out, D

    def apply(self, x: RationalFunction, cache: dict | None = None) -> RationalFunction:
        if cache is None:
            cache = {}
        num, dn = self._apply_series(x.num, cache)
        den, dd = self._apply_series(x.den, cache)
        if dn >= dd:
            return rational(num, den * self._fpow(dn - dd, cache))
        return rational(num * self._fpow(dd - dn, cache), den)


def _crossing_map(n: int, d: int, f: LaurentSeries, normal, sign: int) -> ClusterMap:
    return ClusterMap(n, d, f, tuple(int(x) for x in normal), int(sign))


def a_mutation_pullback(s: Seed, k: int, inverse: bool = False) -> ClusterMap:
    """Pullback of the cluster mutation in direction k, in the seed's own
    chart: z^m picks up f_k^(-<e_k, m>) with f_k built from the direction-k
    coefficients and normal covector."""
    n = s.data.n
    if not 1 <= k <= n:
        raise IndexError(f"direction {k} out of range 1..{n}")
    a = k - 1
    d = s.coeff_lattice.d
    w = tuple(_beta(s.matrix, s.data.r, i, a) for i in range(n))
    f = LaurentSeries.one(n, d)
    for p in s.coeffs[a]:
        f = f * (
            LaurentSeries.monomial((0,) * n, p_minus(p).exponents)
            + LaurentSeries.monomial(w, p_plus(p).exponents)
        )
    return _crossing_map(n, d, f, _unit(n, a), 1 if inverse else -1)


def x_mutation_pullback(ys: YSeed, k: int, inverse: bool = False) -> ClusterMap:
    """Pullback of the Y-side mutation in direction k: z^n picks up
    g_k^(<n, w_k>) with g_k built from the direction-k coefficients on the
    dual torus."""
    n = ys.data.n
    if not 1 <= k <= n:
        raise IndexError(f"direction {k} out of range 1..{n}")
    a = k - 1
    d = ys.coeff_lattice.d
    ek = _unit(n, a)
    g = LaurentSeries.one(n, d)
    for q in ys.qcoeffs[a]:
        g = g * (
            LaurentSeries.monomial((0,) * n, p_minus(q).exponents)
            + LaurentSeries.monomial(ek, p_plus(q).exponents)
        )
    w = tuple(_beta(ys.matrix, ys.data.r, i, a) for i in range(n))
    return _crossing_map(n, d, g, w, -1 if inverse else 1)


def unimodular_inverse_transpose(rows: Matrix) -> Matrix:
    """Inverse transpose of an integer matrix with determinant +-1."""
    n = len(rows)
    aug = [[Fraction(rows[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                fac = aug[r][col]
                aug[r] = [x - fac * y for x, y in zip(aug[r], aug[col])]
    out = []
    for j in range(n):
        row = []
        for i in range(n):
            v = aug[i][n + j]
            if v.denominator != 1:
                raise ValueError("matrix is not unimodular")
            row.append(int(v))
        out.append(tuple(row))
    return tuple(out)


def _mutate_basis_rows(E: Matrix, Bv: Matrix, a: int) -> Matrix:
    """Plus-signed basis mutation in ambient coordinates."""
    n = len(E)
    rows = []
    for i in range(n):
        if i == a:
            rows.append(tuple(-x for x in E[a]))
        else:
            c = max(-Bv[i][a], 0)
            rows.append(tuple(x + c * y for x, y in zip(E[i], E[a])))
    return tuple(rows)


def _ambient_normal(data: FixedData, ek_row, k0: int) -> tuple[int, ...]:
    """omega(-, (d_k/r_k) e_k) in dual coordinates, for e_k given in ambient
    basis coordinates."""
    n = data.n
    scale = Fraction(data.d[k0], data.r[k0])
    out = []
    for a in range(n):
        v = data.omega(_unit(n, a), ek_row) * scale
        if v.denominator != 1:
            raise InvariantViolation("normal covector is not integral")
        out.append(int(v))
    return tuple(out)


def chart_variables(s0: Seed, word) -> tuple[RationalFunction, ...]:
    """Cluster variables at the end of the word computed by composing the
    one-step birational pullbacks in the initial chart (instead of iterating
    exchange relations)."""
    data = s0.data
    n = data.n
    d = s0.coeff_lattice.d
    word = reduce_word(word)
    E: Matrix = tuple(_unit(n, i) for i in range(n))
    s = s0
    steps: list[ClusterMap] = []
    for k in word:
        a = k - 1
        wk = _ambient_normal(data, E[a], a)
        f = LaurentSeries.one(n, d)
        for p in s.coeffs[a]:
            f = f * (
                LaurentSeries.monomial((0,) * n, p_minus(p).exponents)
                + LaurentSeries.monomial(wk, p_plus(p).exponents)
            )
        steps.append(_crossing_map(n, d, f, E[a], -1))
        E = _mutate_basis_rows(E, s.matrix, a)
        s = seed_mutate(s, k)
    dual = unimodular_inverse_transpose(E)
    out = []
    for i in range(n):
        x = RationalFunction(
            LaurentSeries.monomial(dual[i], (0,) * d), LaurentSeries.one(n, d)
        )
        for step in reversed(steps):
            x = step.apply(x)
        out.append(x)
    return tuple(out)


def chart_y_variables(ys0: YSeed, word) -> tuple[RationalFunction, ...]:
    """Y-variables at the end of the word computed by composing the one-step
    pullbacks on the dual torus."""
    data = ys0.data
    n = data.n
    d = ys0.coeff_lattice.d
    word = reduce_word(word)
    E: Matrix = tuple(_unit(n, i) for i in range(n))
    B = ys0.matrix
    q = ys0.qcoeffs
    steps: list[ClusterMap] = []
    for k in word:
        a = k - 1
        wk = _ambient_normal(data, E[a], a)
        g = LaurentSeries.one(n, d)
        for p in q[a]:
            g = g * (
                LaurentSeries.monomial((0,) * n, p_minus(p).exponents)
                + LaurentSeries.monomial(E[a], p_plus(p).exponents)
            )
        steps.append(_crossing_map(n, d, g, wk, 1))
        E = _mutate_basis_rows(E, B, a)
        q = _xcoeffs_mutate(q, B, data.r, a)
        B = matrix_mutate(B, k)
    out = []
    for i in range(n):
        y = RationalFunction(
            LaurentSeries.monomial(E[i], (0,) * d), LaurentSeries.one(n, d)
        )
        for step in reversed(steps):
            y = step.apply(y)
        out.append(y)
    return tuple(out)


# -- serialization -----------------------------------------------------------


def rational_to_json(x: RationalFunction) -> dict:
    return {
        "num": series_to_json(x.num)["terms"],
        "den": series_to_json(x.den)["terms"],
    }


def rational_from_json(data: dict) -> RationalFunction:
    num = series_from_json({"terms": data["num"], "order": "inf"})
    den = series_from_json({"terms": data["den"], "order": "inf"})
    return rational(num, den)


def seed_to_json(s: Seed) -> dict:
    out = {
        "B": [list(row) for row in s.matrix],
        "d": list(s.data.d),
        "r": list(s.data.r),
        "coeffs": [[trop_element_to_json(p) for p in tup] for tup in s.coeffs],
    }
    if s.cluster is not None:
        out["cluster"] = [rational_to_json(x) for x in s.cluster]
    return out


def seed_from_json(data: dict, semifield: bool = True) -> Seed:
    fixed = FixedData(_as_matrix(data["B"]), tuple(data["d"]), tuple(data["r"]))
    coeffs = tuple(
        tuple(trop_element_from_json(p) for p in tup) for tup in data["coeffs"]
    )
    cluster = None
    if data.get("cluster") is not None:
        cluster = tuple(rational_from_json(x) for x in data["cluster"])
    return Seed(fixed, fixed.B, coeffs, cluster, (), semifield)
