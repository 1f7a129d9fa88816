"""Rank-2 scattering diagrams with factored polynomial wall functions.

A wall is a codimension-1 cone together with a function ``prod_a (1 + t_a
z^{m_a})^{c_a}`` whose monomial directions are tangent to the cone.  Crossing a
wall acts on the ambient Laurent ring by ``z^p -> z^p * f^{<n, m(p)>}`` with the
acting normal ``n`` oriented toward the side the path comes from.  The module
builds the incoming diagram of a seed, composes crossings along angular paths,
checks consistency of the loop around the origin, completes a rank-2 diagram
order by order, applies the piecewise-linear mutation transform, collects the
walls spanned by cluster chambers, and specializes coefficients.

Support in rank 2 is always a single ray from the origin; the two halves of an
incoming hyperplane are stored as two ray walls carrying the same function.
Wall monomial exponents are kept in the coefficient basis of the initial seed;
operations that need degrees relative to a mutated seed's own coefficients
(completion stages, truncation) change basis internally and convert back.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, hypot
from typing import Callable, Iterable, Sequence

from .cluster_core import (
    FixedData,
    InvariantViolation,
    Seed,
    _ambient_normal,
    _mutate_basis_rows,
    _unit,
    initial_seed,
    matrix_mutate,
    seed_mutate,
    unimodular_inverse_transpose,
)
from .monoid_ring import (
    Automorphism,
    Derivation,
    Exponent,
    LaurentSeries,
    exponent,
    series_log,
    series_mul,
    series_pow,
    wall_cross,
)
from .semifield import CoeffLattice


class PositivityError(InvariantViolation):
    """A wall exponent came out non-positive or non-integral."""


# -- small integer geometry ---------------------------------------------------


def _gcd_vec(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def _primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = _gcd_vec(v)
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    return tuple(x // g for x in v)


def _cross(u: Sequence[int], v: Sequence[int]) -> int:
    return u[0] * v[1] - u[1] * v[0]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _angle_key(v: Sequence[int]):
    """Total order on ray directions by angle from the positive x-axis.

    Key is (sector, slope); slope y/x is monotone in the angle inside each
    open quadrant, and the four axis directions get even sectors of their own.
    """
    x, y = v[0], v[1]
    if x > 0 and y == 0:
        return (0, Fraction(0))
    if x > 0 and y > 0:
        return (1, Fraction(y, x))
    if x == 0 and y > 0:
        return (2, Fraction(0))
    if x < 0 and y > 0:
        return (3, Fraction(y, x))
    if x < 0 and y == 0:
        return (4, Fraction(0))
    if x < 0 and y < 0:
        return (5, Fraction(y, x))
    if x == 0 and y < 0:
        return (6, Fraction(0))
    return (7, Fraction(y, x))


def _fraction_vec_primitive(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Primitive integer vector positively proportional to a rational one."""
    denom = 1
    for x in v:
        denom = denom * x.denominator // gcd(denom, x.denominator)
    ints = [int(x * denom) for x in v]
    return _primitive(ints)


def _perp_basis(e: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Integer basis of the hyperplane orthogonal to a primitive vector."""
    n = len(e)
    if n == 2:
        return (_primitive((-e[1], e[0])),)
    # column-style elimination: collect n-1 independent relations sum e_i x_i = 0
    idx = next(i for i in range(n) if e[i])
    rows = []
    for j in range(n):
        if j == idx:
            continue
        g = gcd(abs(e[idx]), abs(e[j])) if e[j] else abs(e[idx])
        v = [0] * n
        v[idx] = -e[j] // g
        v[j] = e[idx] // g
        rows.append(_primitive(v) if any(v) else None)
    return tuple(v for v in rows if v is not None)


# -- walls and diagrams -------------------------------------------------------


Atom = tuple[tuple[int, ...], tuple[int, ...], int]


def _combine_atoms(factors: Iterable[Atom]) -> tuple[Atom, ...]:
    merged: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {}
    for t, m, c in factors:
        key = (tuple(int(x) for x in t), tuple(int(x) for x in m))
        merged[key] = merged.get(key, 0) + int(c)
    out = []
    for (t, m), c in merged.items():
        if c == 0:
            continue
        if c < 0:
            raise PositivityError(f"wall factor (1 + t^{t} z^{m}) has exponent {c} < 0")
        out.append((t, m, c))
    out.sort()
    return tuple(out)


@dataclass(frozen=True)
class Wall:
    """One wall: support cone, grading normal, acting normal, factored function.

    ``support`` lists primitive ray generators (exactly one in rank 2).
    ``normal`` is the primitive grading vector of the function's coefficient
    monomials in the tagged seed's basis; ``acting`` is the primitive integer
    normal used by crossings, orthogonal to the support and to every monomial
    exponent.  ``factors`` holds (t, m, c) for ``(1 + t z^m)^c`` with c > 0.
    """

    support: tuple[tuple[int, ...], ...]
    normal: tuple[int, ...]
    acting: tuple[int, ...]
    factors: tuple[Atom, ...]
    incoming: bool = False

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(_primitive(r) for r in self.support))
        object.__setattr__(self, "normal", tuple(int(x) for x in self.normal))
        object.__setattr__(self, "acting", tuple(int(x) for x in self.acting))
        object.__setattr__(self, "factors", _combine_atoms(self.factors))
        if not self.support:
            raise ValueError("wall needs at least one support ray")
        if not any(self.acting):
            raise ValueError("wall needs a nonzero acting normal")
        if self.acting != _primitive(self.acting):
            raise ValueError("acting normal must be primitive")
        for ray in self.support:
            if sum(a * b for a, b in zip(self.acting, ray)):
                raise InvariantViolation(f"support ray {ray} not orthogonal to acting normal {self.acting}")
        for _, m, _ in self.factors:
            if sum(a * b for a, b in zip(self.acting, m)):
                raise InvariantViolation(f"wall monomial {m} not tangent to the wall")

    @property
    def ray(self) -> tuple[int, ...]:
        if len(self.support) != 1:
            raise ValueError("wall support is not a single ray")
        return self.support[0]

    def function(self, order: int | None = None) -> LaurentSeries:
        """Expanded wall function at the given truncation order."""
        if not self.factors:
            raise ValueError("wall has an empty factor list")
        n = len(self.factors[0][1])
        d = len(self.factors[0][0])
        out = LaurentSeries.one(n, d, order)
        for t, m, c in self.factors:
            atom = LaurentSeries.one(n, d, order) + LaurentSeries.monomial(m, t, 1, order)
            out = series_mul(out, series_pow(atom, c))
        return out

    def map_factors(self, fn: Callable[[Atom], Atom], **overrides) -> "Wall":
        kw = dict(
            support=self.support,
            normal=self.normal,
            acting=self.acting,
            factors=tuple(fn(a) for a in self.factors),
            incoming=self.incoming,
        )
        kw.update(overrides)
        return Wall(**kw)


@dataclass(frozen=True)
class ScatteringDiagram:
    """A finite set of walls known modulo coefficient degree > order."""

    walls: tuple[Wall, ...]
    order: int
    seed: Seed | None = None

    def __post_init__(self):
        object.__setattr__(self, "walls", tuple(self.walls))
        if self.order < 1:
            raise ValueError("diagram order must be at least 1")
        if self.seed is not None and self.seed.semifield:
            raise ValueError("scattering diagrams carry group-mode seeds (semifield=False)")

    @property
    def n(self) -> int:
        if self.seed is not None:
            return self.seed.data.n
        return len(self.walls[0].support[0])

    @property
    def dims(self) -> tuple[int, int]:
        for w in self.walls:
            if w.factors:
                return len(w.factors[0][1]), len(w.factors[0][0])
        raise ValueError("diagram has no wall factors to read dimensions from")

    def incoming_walls(self) -> tuple[Wall, ...]:
        return tuple(w for w in self.walls if w.incoming)

    def outgoing_walls(self) -> tuple[Wall, ...]:
        return tuple(w for w in self.walls if not w.incoming)


@dataclass(frozen=True)
class PathSpec:
    """Angular path for rank-2 crossings: from direction ``start`` to ``end``.

    ``ccw`` picks the orientation; ``loop=True`` means a full turn starting and
    ending at ``start``.  Endpoints must not lie on a wall ray.
    """

    start: tuple[int, int]
    end: tuple[int, int]
    ccw: bool = True
    loop: bool = False


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    order: int
    first_failure_degree: int | None = None
    discrepancy: Derivation | None = None


# -- seed frames --------------------------------------------------------------


@dataclass(frozen=True)
class SeedFrame:
    """Ambient data of a mutated seed: basis rows, normal covectors, and the
    exponent basis of its coefficients inside the initial coefficient lattice."""

    seed: Seed
    E: tuple[tuple[int, ...], ...]
    W: tuple[tuple[int, ...], ...]
    U: tuple[tuple[int, ...], ...]
    M: tuple[tuple[int, ...], ...]
    is_identity: bool

    def to_fresh(self, t: Sequence[int]) -> tuple[int, ...]:
        if self.is_identity:
            return tuple(t)
        return tuple(sum(row[j] * t[j] for j in range(len(t))) for row in self.M)

    def to_old(self, a: Sequence[int]) -> tuple[int, ...]:
        if self.is_identity:
            return tuple(a)
        d = len(a)
        return tuple(sum(self.U[f][j] * a[f] for f in range(d)) for j in range(d))

    def fresh_degree(self, t: Sequence[int]) -> int:
        return sum(self.to_fresh(t))


def seed_frame(s: Seed) -> SeedFrame:
    """Replay the seed's word to recover basis rows and coefficient basis."""
    data = s.data
    n = data.n
    E: tuple[tuple[int, ...], ...] = tuple(_unit(n, i) for i in range(n))
    B = data.B
    for k in s.word:
        E = _mutate_basis_rows(E, B, k - 1)
        B = matrix_mutate(B, k)
    if B != s.matrix:
        raise InvariantViolation("seed word does not reproduce the seed matrix")
    W = tuple(_ambient_normal(data, E[i], i) for i in range(n))
    lat = s.coeff_lattice
    U = tuple(tuple(p.exponents) for tup in s.coeffs for p in tup)
    ident = tuple(_unit(lat.d, j) for j in range(lat.d))
    if U == ident:
        return SeedFrame(s, E, W, U, ident, True)
    try:
        M = unimodular_inverse_transpose(U)
    except ValueError as exc:
        raise ValueError("seed coefficients do not form a lattice basis") from exc
    return SeedFrame(s, E, W, U, M, False)


def _grading_data(frame: SeedFrame, t_fresh: Sequence[int]):
    """Grading vector, acting normal, and forced monomial of a coefficient.

    Returns (alpha, n_primitive, acting, m) where alpha holds the per-direction
    degrees of ``t`` in the frame's basis, the normals are ambient primitive
    integer vectors, and m is the unique lattice exponent the grading allows.
    """
    data = frame.seed.data
    lat = frame.seed.coeff_lattice
    n = data.n
    alpha = tuple(sum(t_fresh[j] for j in lat.block_range(i)) for i in range(n))
    if all(a == 0 for a in alpha):
        raise InvariantViolation("coefficient monomial has zero grading")
    if any(a < 0 for a in alpha):
        raise InvariantViolation(f"coefficient monomial grading {alpha} leaves the positive cone")
    n_vec = tuple(sum(alpha[i] * frame.E[i][b] for i in range(n)) for b in range(n))
    nbar = tuple(
        sum(Fraction(alpha[i] * data.d[i], data.r[i]) * frame.E[i][b] for i in range(n))
        for b in range(n)
    )
    acting = _fraction_vec_primitive(nbar)
    m = []
    for b in range(n):
        v = data.omega(_unit(n, b), nbar)
        if v.denominator != 1:
            raise InvariantViolation("wall monomial exponent is not integral")
        m.append(int(v))
    return alpha, _primitive(n_vec), acting, tuple(m)


# -- diagram construction -----------------------------------------------------


def build_initial(s: Seed, order: int) -> ScatteringDiagram:
    """Incoming diagram of a seed: one hyperplane per direction, carrying
    ``prod_j (1 + t_{i,j} z^{w_i})`` with the direction's normal covector w_i.

    In rank 2 each hyperplane is stored as its two opposite rays.
    """
    if s.semifield:
        raise ValueError("build_initial needs a group-mode seed (semifield=False)")
    frame = seed_frame(s)
    data = s.data
    n = data.n
    walls = []
    for i in range(n):
        e_i = _primitive(frame.E[i])
        if frame.E[i] != e_i:
            raise InvariantViolation("basis row is not primitive")
        atoms = tuple((tuple(p.exponents), frame.W[i], 1) for p in s.coeffs[i])
        if n == 2:
            ray = _primitive((-e_i[1], e_i[0]))
            for r in (ray, tuple(-x for x in ray)):
                walls.append(Wall((r,), e_i, e_i, atoms, incoming=True))
        else:
            basis = _perp_basis(e_i)
            rays = tuple(basis) + tuple(tuple(-x for x in v) for v in basis)
            walls.append(Wall(rays, e_i, e_i, atoms, incoming=True))
    return ScatteringDiagram(_sort_walls(walls), order, s)


def _sort_walls(walls: Iterable[Wall]) -> tuple[Wall, ...]:
    def key(w: Wall):
        if len(w.support) == 1 and len(w.support[0]) == 2:
            pos = _angle_key(w.support[0])
        else:
            pos = (8, w.support)
        return (pos, not w.incoming, w.factors)

    return tuple(sorted(walls, key=key))


# -- crossings ----------------------------------------------------------------


def _ray_groups(walls: Sequence[Wall]) -> dict[tuple[int, ...], list[Wall]]:
    groups: dict[tuple[int, ...], list[Wall]] = {}
    for w in walls:
        groups.setdefault(w.ray, []).append(w)
    return groups


def _crossing_eps(ray: tuple[int, ...], acting: tuple[int, ...], ccw: bool) -> int:
    c = _cross(ray, acting)
    if c == 0:
        raise InvariantViolation("acting normal parallel to its own wall ray")
    return -_sign(c) if ccw else _sign(c)


class _FunctionCache:
    __slots__ = ("memo",)

    def __init__(self):
        self.memo: dict[tuple[Wall, int | None], LaurentSeries] = {}

    def get(self, w: Wall, order: int | None) -> LaurentSeries:
        key = (w, order)
        hit = self.memo.get(key)
        if hit is None:
            hit = w.function(order)
            self.memo[key] = hit
        return hit


def _check_same_normal_direction(group: Sequence[Wall]) -> None:
    base = group[0].acting
    for w in group[1:]:
        if _cross(base, w.acting) != 0:
            raise InvariantViolation(
                "simultaneous crossings on one ray do not commute: "
                f"acting normals {base} and {w.acting}"
            )


def _cross_group(
    images: list[LaurentSeries],
    group: Sequence[Wall],
    ccw: bool,
    order: int,
    cache: _FunctionCache,
) -> list[LaurentSeries]:
    _check_same_normal_direction(group)
    for w in sorted(group, key=lambda w: w.factors):
        eps = _crossing_eps(w.ray, w.acting, ccw)
        f = cache.get(w, order)
        images = [wall_cross(x, f, w.acting, eps) for x in images]
    return images


def _generator_images(n: int, d: int, order: int) -> list[LaurentSeries]:
    return [LaurentSeries.monomial(_unit(n, i), (0,) * d, 1, order) for i in range(n)]


def _sorted_rays(groups: dict[tuple[int, ...], list[Wall]]) -> list[tuple[int, ...]]:
    return sorted(groups, key=_angle_key)


def _loop_images(
    walls: Sequence[Wall], d: int, series_order: int, cache: _FunctionCache
) -> list[LaurentSeries]:
    """Full counterclockwise loop starting just below the positive x-axis."""
    groups = _ray_groups(walls)
    images = _generator_images(2, d, series_order)
    for ray in _sorted_rays(groups):
        images = _cross_group(images, groups[ray], True, series_order, cache)
    return images


def _require_rank2(D: ScatteringDiagram, caller: str) -> None:
    if D.n != 2:
        raise ValueError(f"{caller} is defined for rank-2 diagrams only")


def _on_some_ray(v: tuple[int, int], groups: dict[tuple[int, ...], list[Wall]]) -> bool:
    return _primitive(v) in groups


def path_ordered_product(D: ScatteringDiagram, path: PathSpec, order: int | None = None) -> Automorphism:
    """Compose the crossings met along the angular path, first crossed first.

    Coefficient exponents in the result are taken in the seed's own basis.
    """
    _require_rank2(D, "path_ordered_product")
    series_order = (order if order is not None else D.order) + 1
    frame = _frame_or_none(D)
    walls = _fresh_walls(D.walls, frame) if frame is not None else list(D.walls)
    groups = _ray_groups(walls)
    if not any(path.start) or not any(path.end):
        raise ValueError("path endpoints must be nonzero directions")
    if _on_some_ray(path.start, groups) or (not path.loop and _on_some_ray(path.end, groups)):
        raise ValueError("path endpoint lies on a wall")
    rays = _sorted_rays(groups)
    start_key = _angle_key(path.start)
    if path.loop:
        ordered = [r for r in rays if _angle_key(r) > start_key] + [
            r for r in rays if _angle_key(r) < start_key
        ]
        if not path.ccw:
            ordered.reverse()
    else:
        end_key = _angle_key(path.end)
        if path.ccw:
            if start_key < end_key:
                ordered = [r for r in rays if start_key < _angle_key(r) < end_key]
            else:
                ordered = [r for r in rays if _angle_key(r) > start_key] + [
                    r for r in rays if _angle_key(r) < end_key
                ]
        else:
            rev = list(reversed(rays))
            if end_key < start_key:
                ordered = [r for r in rev if end_key < _angle_key(r) < start_key]
            else:
                ordered = [r for r in rev if _angle_key(r) < start_key] + [
                    r for r in rev if _angle_key(r) > end_key
                ]
    cache = _FunctionCache()
    _, d = D.dims
    images = _generator_images(2, d, series_order)
    for ray in ordered:
        images = _cross_group(images, groups[ray], path.ccw, series_order, cache)
    ident = Automorphism.identity(2, d, series_order)
    return Automorphism(images, ident.t_images, series_order)


# -- consistency and completion ----------------------------------------------


def _fresh_walls(walls: Sequence[Wall], frame: SeedFrame) -> list[Wall]:
    if frame.is_identity:
        return list(walls)
    return [w.map_factors(lambda a: (frame.to_fresh(a[0]), a[1], a[2])) for w in walls]


def _old_walls(walls: Sequence[Wall], frame: SeedFrame) -> list[Wall]:
    if frame.is_identity:
        return list(walls)
    return [w.map_factors(lambda a: (frame.to_old(a[0]), a[1], a[2])) for w in walls]


def _defect_derivation(
    walls: Sequence[Wall],
    frame: SeedFrame,
    d: int,
    series_order: int,
    cache: _FunctionCache,
):
    """Log of the loop product's deviation from the identity.

    Returns (first_degree, terms) with terms a list of (coeff, Exponent,
    acting normal, grading vector); both are None when the loop closes.
    """
    images = _loop_images(walls, d, series_order, cache)
    n = 2
    logs = []
    for a in range(n):
        shifted = LaurentSeries(
            {e + Exponent(tuple(-x for x in _unit(n, a)), (0,) * d): c for e, c in images[a].terms.items()},
            images[a].order,
        )
        logs.append(series_log(shifted))
    degrees = [lg.min_coeff_degree() for lg in logs if lg]
    if not degrees:
        return None, None
    first = min(degrees)
    slices = [lg.degree_slice(first) for lg in logs]
    keys = sorted({e for sl in slices for e in sl.terms}, key=lambda e: (e.t, e.m))
    terms = []
    for e in keys:
        alpha, n0, acting, m_expected = _grading_data(frame, e.t)
        if tuple(e.m) != m_expected:
            raise InvariantViolation(
                f"loop defect monomial z^{e.m} t^{e.t} violates the grading (expected z^{m_expected})"
            )
        coeffs = [sl.coefficient(e) for sl in slices]
        c_tilde = None
        for a in range(n):
            pair = acting[a]
            if pair == 0:
                if coeffs[a] != 0:
                    raise InvariantViolation("loop defect is not a derivation along the expected normal")
                continue
            value = Fraction(coeffs[a], pair)
            if c_tilde is None:
                c_tilde = value
            elif c_tilde != value:
                raise InvariantViolation(
                    f"loop defect coefficients disagree across generators: {c_tilde} vs {value}"
                )
        terms.append((c_tilde, e, acting, n0))
    return first, terms


def check_consistency(D: ScatteringDiagram, order: int | None = None) -> ConsistencyReport:
    """Is the counterclockwise loop around the origin the identity?"""
    _require_rank2(D, "check_consistency")
    if D.seed is None:
        raise ValueError("check_consistency needs the diagram's seed for the degree grading")
    ord_ = order if order is not None else D.order
    frame = seed_frame(D.seed)
    walls = _fresh_walls(D.walls, frame)
    cache = _FunctionCache()
    first, terms = _defect_derivation(walls, frame, D.seed.coeff_lattice.d, ord_ + 1, cache)
    if first is None:
        return ConsistencyReport(True, ord_)
    derivation = Derivation((c, e, acting) for c, e, acting, _ in terms)
    return ConsistencyReport(False, ord_, first, derivation)


def complete_rank2(D: ScatteringDiagram, order: int | None = None) -> ScatteringDiagram:
    """Add outgoing walls order by order until the loop closes.

    At each coefficient degree the loop defect is a derivation; every term
    forces one factor ``(1 + t z^m)^c`` on the ray opposite to m, and the
    exponent must come out a positive integer.  Idempotent on consistent input.
    """
    _require_rank2(D, "complete_rank2")
    if D.seed is None:
        raise ValueError("complete_rank2 needs the diagram's seed")
    ord_ = order if order is not None else D.order
    frame = seed_frame(D.seed)
    lat = D.seed.coeff_lattice
    walls = _fresh_walls(D.walls, frame)
    cache = _FunctionCache()
    outgoing: dict[tuple[int, ...], Wall] = {}
    for w in walls:
        if not w.incoming:
            if w.ray in outgoing:
                raise ValueError("diagram has two outgoing walls on one ray; merge them first")
            outgoing[w.ray] = w
    for degree in range(2, ord_ + 1):
        first, terms = _defect_derivation(walls, frame, lat.d, degree + 1, cache)
        if first is None:
            continue
        if first < degree:
            raise InvariantViolation(
                f"completion left a defect at degree {first} below the current stage {degree}"
            )
        for c_tilde, e, acting, n0 in terms:
            ray = _primitive(tuple(-x for x in e.m))
            eps = _crossing_eps(ray, acting, True)
            c = -eps * c_tilde
            if c.denominator != 1 or c <= 0:
                raise PositivityError(
                    f"completion needs (1 + t^{e.t} z^{e.m})^{c}; exponent is not a positive integer"
                )
            atom = (e.t, e.m, int(c))
            old = outgoing.get(ray)
            if old is None:
                new = Wall((ray,), n0, acting, (atom,), incoming=False)
            else:
                if _cross(old.acting, acting) != 0:
                    raise InvariantViolation("existing wall on the ray has a different normal direction")
                new = Wall(old.support, old.normal, old.acting, old.factors + (atom,), old.incoming)
                walls.remove(old)
            outgoing[ray] = new
            walls.append(new)
    first, _ = _defect_derivation(walls, frame, lat.d, ord_ + 1, cache)
    if first is not None:
        raise InvariantViolation(f"completion finished but the loop still fails at degree {first}")
    return ScatteringDiagram(_sort_walls(_old_walls(walls, frame)), ord_, D.seed)


# -- mutation transform -------------------------------------------------------


def tk_transform(D: ScatteringDiagram, k: int) -> ScatteringDiagram:
    """Piecewise-linear transform matching mutation in direction k.

    Walls on the positive side of the direction-k hyperplane are bent by
    ``m -> m + <e_k, m> r_k w_k`` with coefficients picking up the block
    product t_k to the same power; the negative side is fixed; the direction-k
    hyperplane trades its function for the one with inverted coefficients.
    The result is tagged with the one-step mutated seed.
    """
    _require_rank2(D, "tk_transform")
    if D.seed is None:
        raise ValueError("tk_transform needs the diagram's seed")
    s = D.seed
    data = s.data
    n = data.n
    if not 1 <= k <= n:
        raise IndexError(f"direction {k} out of range 1..{n}")
    a = k - 1
    frame = seed_frame(s)
    e_k = frame.E[a]
    w_k = frame.W[a]
    r_k = data.r[a]
    tk_exps = tuple(sum(p.exponents[j] for p in s.coeffs[a]) for j in range(s.coeff_lattice.d))
    slab_atoms = _combine_atoms((tuple(p.exponents), w_k, 1) for p in s.coeffs[a])

    def pairing_e(m: Sequence[int]) -> int:
        return sum(x * y for x, y in zip(e_k, m))

    slab, rest = [], []
    for w in D.walls:
        if w.incoming and _cross(w.normal, e_k) == 0:
            slab.append(w)
        else:
            rest.append(w)
    if len(slab) != 2 or any(w.factors != slab_atoms for w in slab):
        raise ValueError("diagram does not carry the expected direction-k hyperplane to trade away")

    s2 = seed_mutate(s, k)
    frame2 = seed_frame(s2)
    new_walls: list[Wall] = []
    for w in rest:
        h_ray = pairing_e(w.ray)
        if h_ray <= 0:
            new_walls.append(w)
            continue
        ray2 = _primitive(tuple(x + h_ray * r_k * y for x, y in zip(w.ray, w_k)))
        atoms2 = []
        for t, m, c in w.factors:
            h = pairing_e(m)
            t2 = tuple(x + h * y for x, y in zip(t, tk_exps))
            m2 = tuple(x + h * r_k * y for x, y in zip(m, w_k))
            atoms2.append((t2, m2, c))
        pair_w = sum(x * y for x, y in zip(w_k, w.acting))
        acting2 = tuple(x - r_k * pair_w * y for x, y in zip(w.acting, e_k))
        normal2 = _regrade_normal(frame2, atoms2)
        new_walls.append(Wall((ray2,), normal2, _primitive(acting2), tuple(atoms2), w.incoming))
    e_k2 = _primitive(frame2.E[a])
    inv_atoms = tuple(
        (tuple(-x for x in p.exponents), tuple(-x for x in w_k), 1) for p in s.coeffs[a]
    )
    ray = _primitive((-e_k2[1], e_k2[0]))
    for r in (ray, tuple(-x for x in ray)):
        new_walls.append(Wall((r,), e_k2, e_k2, inv_atoms, incoming=True))
    return ScatteringDiagram(_sort_walls(new_walls), D.order, s2)


def tk_invariance_check(
    s: Seed, k: int, order: int
) -> tuple[ScatteringDiagram, ScatteringDiagram, bool]:
    """Compare the mutation transform of the completed diagram against the
    completed diagram of the one-step mutated seed, at the given order.

    A factor of the mutated-seed diagram at this order can descend from a
    source factor of higher degree, so the source is completed deep enough to
    cover every preimage before transforming and truncating.  Returns
    (transformed side, mutated-seed side, equivalent?).
    """
    frame = seed_frame(s)
    if not frame.is_identity:
        raise ValueError("tk_invariance_check starts from the base seed")
    rhs = complete_rank2(build_initial(seed_mutate(s, k), order))
    e_k = frame.E[k - 1]
    tk_total = sum(sum(p.exponents) for p in s.coeffs[k - 1])
    K = order
    for w in rhs.walls:
        for t, m, _ in w.factors:
            h = sum(x * y for x, y in zip(e_k, m))
            K = max(K, sum(t), sum(t) - h * tk_total)
    lhs = diagram_truncate(tk_transform(complete_rank2(build_initial(s, K)), k), order)
    return lhs, rhs, diagrams_equivalent(lhs, rhs)


def _regrade_normal(frame: SeedFrame, atoms: Sequence[Atom]) -> tuple[int, ...]:
    """Primitive grading vector of a transformed wall, from its own atoms."""
    base: tuple[int, ...] | None = None
    for t, _, _ in atoms:
        _, n0, _, _ = _grading_data(frame, frame.to_fresh(t))
        if base is None:
            base = n0
        elif base != n0 and base != tuple(-x for x in n0):
            raise InvariantViolation("wall atoms have incompatible gradings")
    assert base is not None
    return base


# -- cluster chamber walls ----------------------------------------------------


def cluster_chamber_walls(s: Seed, depth: int) -> tuple[Wall, ...]:
    """Walls spanned by the chamber facets reachable in ``depth`` mutations.

    Each chamber contributes one wall per facet: support spanned by the other
    frame vectors, function ``prod_j (1 + p_{i,j}^eps z^{eps w_i})`` from the
    chamber's tropical coefficients, with eps the frame sign of direction i.
    Duplicate facets must agree exactly; disagreement is an error.
    """
    from .cluster_core import GVectorFrame, initial_g_frame, g_frame_mutate, seed_key

    if s.word:
        raise ValueError("cluster_chamber_walls starts from the base seed")
    data = s.data
    n = data.n
    trop = initial_seed(data, with_cluster=False, semifield=True)
    G0 = initial_g_frame(data)
    found: dict[tuple[tuple[int, ...], ...], Wall] = {}
    seen = {(seed_key(trop), G0.g, G0.gstar)}
    frontier: list[tuple] = [(trop, G0)]

    def emit(sd: Seed, G: GVectorFrame) -> None:
        for i in range(1, n + 1):
            eps = G.epsilon(i)
            w_i = G.w(i)
            support = tuple(sorted(G.g[j] for j in range(n) if j != i - 1))
            atoms = tuple(
                (tuple(eps * x for x in p.exponents), tuple(eps * x for x in w_i), 1)
                for p in sd.coeffs[i - 1]
            )
            acting = tuple(eps * x for x in G.gstar[i - 1])
            lat = sd.coeff_lattice
            alphas = {
                tuple(sum(t[j] for j in lat.block_range(b)) for b in range(n))
                for t, _, _ in atoms
            }
            if len(alphas) != 1:
                raise InvariantViolation("facet coefficients have mixed gradings")
            wall = Wall(support, _primitive(next(iter(alphas))), acting, atoms, incoming=False)
            old = found.get(support)
            if old is None:
                found[support] = wall
            elif old.factors != wall.factors or _cross2_free(old.acting, wall.acting):
                raise InvariantViolation(f"facet {support} reached twice with different walls")

    emit(trop, G0)
    for _ in range(depth):
        nxt = []
        for sd, G in frontier:
            for k in range(1, n + 1):
                G2 = g_frame_mutate(G, sd, k)
                sd2 = seed_mutate(sd, k)
                key = (seed_key(sd2), G2.g, G2.gstar)
                if key in seen:
                    continue
                seen.add(key)
                emit(sd2, G2)
                nxt.append((sd2, G2))
        frontier = nxt
    return _sort_walls(found.values())


def _cross2_free(u: tuple[int, ...], v: tuple[int, ...]) -> bool:
    """Not parallel, for vectors of any length."""
    for i in range(len(u)):
        for j in range(i + 1, len(u)):
            if u[i] * v[j] - u[j] * v[i]:
                return True
    return False


# -- specialization -----------------------------------------------------------


Gauss = tuple[Fraction, Fraction]


def _as_gauss(x) -> Gauss:
    if isinstance(x, tuple):
        re, im = x
        return (Fraction(re), Fraction(im))
    if isinstance(x, (int, Fraction)):
        return (Fraction(x), Fraction(0))
    raise TypeError(f"scalars must be rational or (re, im) pairs, got {type(x).__name__}")


def _gauss_mul(x: Gauss, y: Gauss) -> Gauss:
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _gauss_pow(x: Gauss, e: int) -> Gauss:
    if e < 0:
        norm = x[0] * x[0] + x[1] * x[1]
        if norm == 0:
            raise ZeroDivisionError("inverse of zero scalar")
        x = (x[0] / norm, -x[1] / norm)
        e = -e
    out: Gauss = (Fraction(1), Fraction(0))
    while e:
        if e & 1:
            out = _gauss_mul(out, x)
        x = _gauss_mul(x, x)
        e >>= 1
    return out


def ord_specialization_scalars(s: Seed) -> tuple[tuple[Gauss, ...], ...]:
    """Scalars collapsing each block product to ``1 + u^{r_i}``; needs r_i <= 2."""
    out = []
    for i, r in enumerate(s.data.r):
        if r == 1:
            out.append(((Fraction(1), Fraction(0)),))
        elif r == 2:
            out.append(((Fraction(0), Fraction(1)), (Fraction(0), Fraction(-1))))
        else:
            raise NotImplementedError(f"no exact scalar field wired in for block degree {r}")
    return tuple(out)


def specialize_diagram(D: ScatteringDiagram, scalars) -> ScatteringDiagram:
    """Send each t_{i,j} to scalar_{i,j} * t_{i,1} and re-factor every wall.

    Degrees within each block collapse onto the block's first generator, so the
    coefficient lattice and the grading stay as they were.  The scalars may be
    rational or Gaussian-rational (as (re, im) pairs); each specialized wall
    function must come out with integer coefficients, and the result must stay
    consistent at the diagram's order.
    """
    _require_rank2(D, "specialize_diagram")
    if D.seed is None:
        raise ValueError("specialize_diagram needs the diagram's seed")
    if not seed_frame(D.seed).is_identity:
        raise ValueError("specialize the diagram of the base seed, before any mutation transform")
    n, d = D.dims
    lat = D.seed.coeff_lattice
    flat_scalars: list[Gauss] = []
    for i in range(n):
        row = scalars[i]
        if len(row) != D.seed.data.r[i]:
            raise ValueError("one scalar per coefficient generator required")
        for x in row:
            g = _as_gauss(x)
            if g == (Fraction(0), Fraction(0)):
                raise ValueError("specialization scalars must be nonzero")
            flat_scalars.append(g)
    series_order = D.order + 1
    new_walls = []
    for w in D.walls:
        terms: dict[Exponent, Gauss] = {
            exponent((0,) * n, (0,) * d): (Fraction(1), Fraction(0))
        }
        for t, m, c in w.factors:
            scale: Gauss = (Fraction(1), Fraction(0))
            for j, e in enumerate(t):
                if e:
                    scale = _gauss_mul(scale, _gauss_pow(flat_scalars[j], e))
            tc = [0] * d
            for i in range(n):
                rng = lat.block_range(i)
                tc[rng.start] = sum(t[j] for j in rng)
            atom_exp = exponent(m, tc)
            for _ in range(c):
                nxt: dict[Exponent, Gauss] = {}
                for e1, c1 in terms.items():
                    _acc(nxt, e1, c1)
                    e2 = e1 + atom_exp
                    if e2.coeff_degree < series_order:
                        _acc(nxt, e2, _gauss_mul(c1, scale))
                terms = nxt
        int_terms: dict[Exponent, int] = {}
        for e, (re, im) in terms.items():
            if im != 0:
                raise PositivityError(f"specialized wall function has imaginary part at {e}")
            if re.denominator != 1:
                raise PositivityError(f"specialized wall function has non-integer coefficient at {e}")
            if re:
                int_terms[e] = int(re)
        f = LaurentSeries(int_terms, series_order)
        atoms = _greedy_atoms(f, series_order)
        if not atoms:
            continue
        new_walls.append(Wall(w.support, w.normal, w.acting, atoms, w.incoming))
    out = ScatteringDiagram(_sort_walls(new_walls), D.order, D.seed)
    report = check_consistency(out)
    if not report.consistent:
        raise InvariantViolation(
            f"specialized diagram is inconsistent at degree {report.first_failure_degree}"
        )
    return out


def _acc(terms: dict[Exponent, Gauss], e: Exponent, c: Gauss) -> None:
    old = terms.get(e, (Fraction(0), Fraction(0)))
    s = (old[0] + c[0], old[1] + c[1])
    if s == (0, 0):
        terms.pop(e, None)
    else:
        terms[e] = s


def _greedy_atoms(f: LaurentSeries, series_order: int) -> tuple[Atom, ...]:
    """Factor ``1 + higher`` into atoms, smallest monomial first."""
    dims = f.dims()
    if dims is None:
        raise PositivityError("wall function vanished under specialization")
    n, d = dims
    atoms: list[Atom] = []
    work = f
    for _ in range(series_order * max(1, len(f.terms)) + 8):
        nonconst = [(e, c) for e, c in work.terms.items() if e.coeff_degree > 0]
        if not nonconst:
            break
        e, c = min(nonconst, key=lambda item: (item[0].coeff_degree, item[0].t, item[0].m))
        if not isinstance(c, int) or c <= 0:
            raise PositivityError(f"cannot factor wall function: leading term {c} * z^{e.m} t^{e.t}")
        atoms.append((e.t, e.m, c))
        atom = LaurentSeries.one(n, d, series_order) + LaurentSeries.monomial(e.m, e.t, 1, series_order)
        work = series_mul(work, series_pow(atom, -c))
    else:
        raise PositivityError("wall function did not factor into finitely many atoms")
    if not work.is_one():
        raise PositivityError("wall function left a non-trivial remainder after factoring")
    return _combine_atoms(atoms)


# -- equivalence and truncation ----------------------------------------------


def _frame_or_none(D: ScatteringDiagram) -> SeedFrame | None:
    return seed_frame(D.seed) if D.seed is not None else None


def canonical_form(
    D: ScatteringDiagram, order: int | None = None, refactor: bool = False
) -> dict[tuple[int, ...], tuple[Atom, ...]]:
    """Map each support ray to the merged, canonically factored function.

    Merging, degree cuts, and refactoring happen in the seed's own coefficient
    basis; the returned atom exponents are in the initial basis.
    """
    ord_ = order if order is not None else D.order
    frame = _frame_or_none(D)
    to_fresh = frame.to_fresh if frame is not None else tuple
    to_old = frame.to_old if frame is not None else tuple
    merged: dict[tuple[int, ...], list[Atom]] = {}
    for w in D.walls:
        for ray in w.support:
            for t, m, c in w.factors:
                tf = to_fresh(t)
                if sum(tf) <= ord_:
                    merged.setdefault(ray, []).append((tf, m, c))
    out = {}
    for ray, atoms in merged.items():
        combined = _combine_atoms(atoms)
        if not combined:
            continue
        if refactor:
            n = len(ray)
            d = len(combined[0][0])
            f = LaurentSeries.one(n, d, ord_ + 1)
            for t, m, c in combined:
                atom = LaurentSeries.one(n, d, ord_ + 1) + LaurentSeries.monomial(m, t, 1, ord_ + 1)
                f = series_mul(f, series_pow(atom, c))
            combined = _greedy_atoms(f, ord_ + 1)
        out[ray] = tuple((to_old(t), m, c) for t, m, c in combined)
    return out


def diagrams_equivalent(
    D1: ScatteringDiagram, D2: ScatteringDiagram, order: int | None = None
) -> bool:
    """Same walls after merging per support, else same path-ordered products.

    Both diagrams must sit over the same seed (or both carry none), so that
    degrees and products are compared in one coefficient basis.
    """
    from .cluster_core import seed_key

    if (D1.seed is None) != (D2.seed is None):
        raise ValueError("cannot compare a seed-tagged diagram with an untagged one")
    if D1.seed is not None and seed_key(D1.seed) != seed_key(D2.seed):
        raise ValueError("diagrams sit over different seeds")
    ord_ = min(D1.order, D2.order) if order is None else order
    if canonical_form(D1, ord_) == canonical_form(D2, ord_):
        return True
    if canonical_form(D1, ord_, refactor=True) == canonical_form(D2, ord_, refactor=True):
        return True
    if D1.n != 2 or D2.n != 2:
        return False
    # compare the crossing prefix products over the union fan
    _, d = D1.dims
    if d != D2.dims[1]:
        return False
    frame1, frame2 = _frame_or_none(D1), _frame_or_none(D2)
    w1 = _fresh_walls(D1.walls, frame1) if frame1 is not None else list(D1.walls)
    w2 = _fresh_walls(D2.walls, frame2) if frame2 is not None else list(D2.walls)
    g1 = _ray_groups(w1)
    g2 = _ray_groups(w2)
    rays = sorted(set(g1) | set(g2), key=_angle_key)
    cache = _FunctionCache()
    series_order = ord_ + 1
    im1 = _generator_images(2, d, series_order)
    im2 = _generator_images(2, d, series_order)
    for ray in rays:
        if ray in g1:
            im1 = _cross_group(im1, g1[ray], True, series_order, cache)
        if ray in g2:
            im2 = _cross_group(im2, g2[ray], True, series_order, cache)
        if any(not a.eq_mod_order(b) for a, b in zip(im1, im2)):
            return False
    return True


def diagram_truncate(D: ScatteringDiagram, order: int) -> ScatteringDiagram:
    """Drop wall factors above ``order`` in the seed's coefficient degrees."""
    if order > D.order:
        raise ValueError("cannot truncate to a higher order than the diagram carries")
    frame = _frame_or_none(D)
    degree = frame.fresh_degree if frame is not None else sum
    walls = []
    for w in D.walls:
        kept = tuple(a for a in w.factors if degree(a[0]) <= order)
        if kept:
            walls.append(Wall(w.support, w.normal, w.acting, kept, w.incoming))
    return ScatteringDiagram(_sort_walls(walls), order, D.seed)


# -- serialization and rendering ----------------------------------------------


def diagram_to_json(D: ScatteringDiagram) -> dict:
    walls = []
    for w in D.walls:
        walls.append(
            {
                "support": {"rays": [list(r) for r in w.support]},
                "normal": list(w.normal),
                "acting_normal": [str(Fraction(x)) for x in w.acting],
                "factors": [{"t": list(t), "m": list(m), "c": c} for t, m, c in w.factors],
                "incoming": w.incoming,
            }
        )
    return {"order": D.order, "walls": walls}


def diagram_from_json(data: dict | str) -> ScatteringDiagram:
    if isinstance(data, str):
        data = json.loads(data)
    walls = []
    for entry in data["walls"]:
        acting = []
        for x in entry["acting_normal"]:
            f = Fraction(x)
            if f.denominator != 1:
                raise ValueError("only integral acting normals are supported")
            acting.append(int(f))
        walls.append(
            Wall(
                tuple(tuple(r) for r in entry["support"]["rays"]),
                tuple(entry["normal"]),
                tuple(acting),
                tuple((tuple(f["t"]), tuple(f["m"]), int(f["c"])) for f in entry["factors"]),
                bool(entry["incoming"]),
            )
        )
    return ScatteringDiagram(tuple(walls), int(data["order"]), None)


def _atom_str(atom: Atom, lat: CoeffLattice | None) -> str:
    t, m, c = atom
    parts = []
    for j, e in enumerate(t):
        if e:
            if lat is not None:
                i, jj = _block_of(lat, j)
                name = f"t{i + 1}{jj + 1}"
            else:
                name = f"t{j}"
            parts.append(name if e == 1 else f"{name}^{e}")
    mono = ",".join(str(x) for x in m)
    parts.append(f"z^({mono})")
    body = f"(1+{'*'.join(parts)})"
    return body if c == 1 else f"{body}^{c}"


def _block_of(lat: CoeffLattice, flat: int) -> tuple[int, int]:
    for i in range(lat.n):
        rng = lat.block_range(i)
        if flat in rng:
            return i, flat - rng.start
    raise IndexError(flat)


def wall_label(w: Wall, lat: CoeffLattice | None = None) -> str:
    return "".join(_atom_str(a, lat) for a in w.factors)


def render_svg(D: ScatteringDiagram) -> str:
    """Deterministic 1000x1000 picture of a rank-2 diagram."""
    _require_rank2(D, "render_svg")
    lat = D.seed.coeff_lattice if D.seed is not None else None
    cx = cy = 500.0
    length = 430.0
    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="1000" height="1000" viewBox="0 0 1000 1000">',
        '<rect width="1000" height="1000" fill="white"/>',
        f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="3" fill="black"/>',
    ]
    for w in _sort_walls(D.walls):
        x, y = w.ray
        norm = hypot(x, y)
        ux, uy = x / norm, y / norm
        x2, y2 = cx + length * ux, cy - length * uy
        color = "#1f6fb4" if w.incoming else "#c23b22"
        dash = ' stroke-dasharray="7,4"' if w.incoming else ""
        lines.append(
            f'<line x1="{cx:.1f}" y1="{cy:.1f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{color}" stroke-width="2"{dash}/>'
        )
        lx, ly = cx + (length + 18) * ux, cy - (length + 18) * uy
        anchor = "start" if ux >= 0 else "end"
        label = f"({x},{y})  {wall_label(w, lat)}"
        lines.append(
            f'<text x="{lx:.2f}" y="{ly:.2f}" font-size="13" font-family="monospace" '
            f'text-anchor="{anchor}" fill="black">{_xml_escape(label)}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _xml_escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
