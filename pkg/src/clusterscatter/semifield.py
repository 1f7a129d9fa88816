"""Tropical semifield on the coefficient generators.

The coefficient group is the free multiplicative abelian group on generators
``p[i][j]`` for directions ``i`` in ``range(n)`` and ``j`` in ``range(r_i)``,
where ``r_i`` is the polynomial order attached to direction ``i``.  An element
is a dense integer exponent vector over the flat generator list
``(0,0), (0,1), ..., (n-1, r_{n-1}-1)``.

Tropical addition is the componentwise minimum of exponent vectors; the group
law (written multiplicatively) is componentwise addition.  ``p_plus`` and
``p_minus`` split an element into its numerator and denominator parts, so that
``p == p_plus(p) / p_minus(p)`` with disjoint supports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class CoeffLattice:
    """Shape of the generator set: one block of size ``orders[i]`` per direction."""

    orders: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "orders", tuple(int(r) for r in self.orders))
        if len(self.orders) == 0:
            raise ValueError("at least one direction required")
        if any(r < 1 for r in self.orders):
            raise ValueError("orders must be positive integers")

    @property
    def n(self) -> int:
        return len(self.orders)

    @property
    def d(self) -> int:
        return sum(self.orders)

    def flat_index(self, i: int, j: int) -> int:
        """Position of generator (i, j) in the flat exponent vector."""
        if not (0 <= i < self.n):
            raise IndexError(f"direction {i} out of range")
        if not (0 <= j < self.orders[i]):
            raise IndexError(f"generator index {j} out of range for direction {i}")
        return sum(self.orders[:i]) + j

    def block_range(self, i: int) -> range:
        start = sum(self.orders[:i])
        return range(start, start + self.orders[i])

    def one(self) -> TropElement:
        return TropElement(self, (0,) * self.d)

    def generator(self, i: int, j: int) -> TropElement:
        exps = [0] * self.d
        exps[self.flat_index(i, j)] = 1
        return TropElement(self, tuple(exps))

    def generators(self) -> list[TropElement]:
        return [self.generator(i, j) for i in range(self.n) for j in range(self.orders[i])]

    def element(self, exponents: Sequence[int]) -> TropElement:
        return TropElement(self, tuple(int(e) for e in exponents))


@dataclass(frozen=True)
class TropElement:
    """Element of the tropical semifield, stored by generator exponents."""

    lattice: CoeffLattice
    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        if len(self.exponents) != self.lattice.d:
            raise ValueError(
                f"exponent vector has length {len(self.exponents)}, lattice needs {self.lattice.d}"
            )

    def __mul__(self, other: TropElement) -> TropElement:
        _check_same_lattice(self, other)
        return TropElement(self.lattice, tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __truediv__(self, other: TropElement) -> TropElement:
        _check_same_lattice(self, other)
        return TropElement(self.lattice, tuple(a - b for a, b in zip(self.exponents, other.exponents)))

    def __pow__(self, e: int) -> TropElement:
        return TropElement(self.lattice, tuple(a * int(e) for a in self.exponents))

    def inv(self) -> TropElement:
        return TropElement(self.lattice, tuple(-a for a in self.exponents))

    def is_one(self) -> bool:
        return all(a == 0 for a in self.exponents)

    def __str__(self) -> str:
        if self.is_one():
            return "1"
        parts = []
        for i in range(self.lattice.n):
            for j in range(self.lattice.orders[i]):
                e = self.exponents[self.lattice.flat_index(i, j)]
                if e == 0:
                    continue
                name = f"p[{i},{j}]"
                parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts)


def _check_same_lattice(a: TropElement, b: TropElement) -> None:
    if a.lattice.orders != b.lattice.orders:
        raise ValueError(f"lattice mismatch: {a.lattice.orders} vs {b.lattice.orders}")


def trop_add(a: TropElement, b: TropElement) -> TropElement:
    """Tropical sum: componentwise minimum of exponent vectors."""
    _check_same_lattice(a, b)
    return TropElement(a.lattice, tuple(min(x, y) for x, y in zip(a.exponents, b.exponents)))


def p_plus(a: TropElement) -> TropElement:
    """Positive part: keeps exponents ``max(e, 0)``; equals ``a / (a (+) 1)``."""
    return TropElement(a.lattice, tuple(max(e, 0) for e in a.exponents))


def p_minus(a: TropElement) -> TropElement:
    """Negative part: keeps exponents ``max(-e, 0)``; ``p_plus(a) / p_minus(a) == a``."""
    return TropElement(a.lattice, tuple(max(-e, 0) for e in a.exponents))


def evaluate(a: TropElement, values: Sequence) -> Fraction:
    """Group homomorphism into the multiplicative group of the target ring.

    ``values`` lists one nonzero scalar per generator, in flat order.  Exact
    rationals by default; any type supporting ``**`` and ``*`` works.
    """
    if len(values) != a.lattice.d:
        raise ValueError(f"need {a.lattice.d} generator values, got {len(values)}")
    result = None
    for v, e in zip(values, a.exponents):
        if v == 0:
            raise ValueError("generator value must be nonzero")
        if e == 0:
            continue
        if isinstance(v, int) and e < 0:
            v = Fraction(v)
        factor = v**e
        result = factor if result is None else result * factor
    if result is None:
        return Fraction(1)
    return result


def trop_element_to_json(a: TropElement) -> dict:
    return {"orders": list(a.lattice.orders), "exponents": list(a.exponents)}


def trop_element_from_json(data: dict | str) -> TropElement:
    if isinstance(data, str):
        data = json.loads(data)
    lattice = CoeffLattice(tuple(data["orders"]))
    return lattice.element(data["exponents"])
