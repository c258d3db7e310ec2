"""Finite abelian domains and exact rational arithmetic.

Two domain shapes are supported: the cyclic group Z_M (optionally read as a
grid of R samples per unit over a window of the real line) and the product
group Z_p^n. Elements of a product domain are flattened to a single index in
row-major order, first coordinate most significant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

# Rational numbers are plain fractions.Fraction: arbitrary precision, always
# in lowest terms with a positive denominator.
Rational = Fraction


class InvalidRational(ZeroDivisionError):
    pass


class DomainError(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Grid:
    """Sampling of the real line: index k is the point k/R."""

    samples_per_unit: int

    def __post_init__(self):
        if self.samples_per_unit < 1:
            raise DomainError("samples_per_unit must be positive")


@dataclass(frozen=True)
class Cyclic:
    M: int
    grid: Optional[Grid] = None

    def __post_init__(self):
        if self.M < 1:
            raise DomainError(f"cyclic order must be >= 1, got {self.M}")
        if self.grid is not None and self.M % self.grid.samples_per_unit:
            raise DomainError("M must be a multiple of samples_per_unit")

    @property
    def size(self) -> int:
        return self.M

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.M,)

    @property
    def moduli(self) -> tuple[int, ...]:
        return (self.M,)

    def frequency(self, j: int) -> Fraction:
        """Real frequency of index j (cycles per unit) on a grid, else j itself."""
        if self.grid is None:
            return Fraction(j)
        return Fraction(j * self.grid.samples_per_unit, self.M)

    def to_dict(self) -> dict:
        grid = None if self.grid is None else {"R": self.grid.samples_per_unit}
        return {"kind": "cyclic", "M": self.M, "grid": grid}


@dataclass(frozen=True)
class Product:
    p: int
    n: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise DomainError(f"p must be prime, got {self.p}")
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")

    @property
    def size(self) -> int:
        return self.p**self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.p,) * self.n

    @property
    def moduli(self) -> tuple[int, ...]:
        return self.shape

    def to_dict(self) -> dict:
        return {"kind": "product", "p": self.p, "n": self.n}


DomainSpec = Union[Cyclic, Product]


def domain_from_dict(data: dict) -> DomainSpec:
    kind = data.get("kind")
    if kind == "cyclic":
        grid = data.get("grid")
        return Cyclic(int(data["M"]), None if grid is None else Grid(int(grid["R"])))
    if kind == "product":
        return Product(int(data["p"]), int(data["n"]))
    raise DomainError(f"unknown domain kind {kind!r}")


def element(coords: Sequence[int], d: DomainSpec) -> tuple[int, ...]:
    """Build a group element of ``d``, reducing each coordinate."""
    if len(coords) != len(d.moduli):
        raise DomainError(
            f"element has {len(coords)} coordinates, domain needs {len(d.moduli)}"
        )
    return tuple(int(c) % m for c, m in zip(coords, d.moduli))


def index_of(x: Sequence[int], d: DomainSpec) -> int:
    idx = 0
    for c, m in zip(element(x, d), d.moduli):
        idx = idx * m + c
    return idx


def element_at(index: int, d: DomainSpec) -> tuple[int, ...]:
    if not 0 <= index < d.size:
        raise DomainError(f"index {index} out of range for domain of size {d.size}")
    coords = []
    for m in reversed(d.moduli):
        index, c = divmod(index, m)
        coords.append(c)
    return tuple(reversed(coords))


def add(x: Sequence[int], y: Sequence[int], d: DomainSpec) -> tuple[int, ...]:
    x, y = element(x, d), element(y, d)
    return tuple((a + b) % m for a, b, m in zip(x, y, d.moduli))


def gcd(a: int, b: int) -> int:
    """Euclid's algorithm on nonnegative integers; gcd(0, x) == x."""
    if a < 0 or b < 0:
        raise ValueError("gcd expects nonnegative integers")
    while b:
        a, b = b, a % b
    return a


def normalize(num: int, den: int) -> Fraction:
    if den == 0:
        raise InvalidRational(f"zero denominator in {num}/{den}")
    return Fraction(num, den)


def rational_str(r: Fraction) -> str:
    return f"{r.numerator}/{r.denominator}"
