"""Characteristic polynomials, beta invariants and Orlik-Solomon dimensions.

The characteristic polynomial is computed twice, from the Moebius function of the
lattice of flats and by deletion-contraction; the wedge dimensions of the fan support
give a third, geometric route to the coefficients of the reduced polynomial.
"""

import itertools
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from sympy import Poly, symbols

from bergmankit import config, linalg
from bergmankit.fans import Fan, fine_fan, lineality_dim
from bergmankit.matroid import LoopError, Matroid, contract, delete, simplify

logger = logging.getLogger(__name__)

T = symbols("t")


@dataclass(frozen=True)
class IntPolynomial:
    """An integer polynomial in t, coefficients listed from the constant term up."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        trimmed = list(self.coefficients)
        while trimmed and trimmed[-1] == 0:
            trimmed.pop()
        object.__setattr__(self, "coefficients", tuple(int(c) for c in trimmed))

    @classmethod
    def from_poly(cls, poly: Poly) -> "IntPolynomial":
        return cls(tuple(int(c) for c in reversed(poly.all_coeffs())))

    @classmethod
    def t_minus_one_power(cls, exponent: int) -> "IntPolynomial":
        return cls.from_poly(Poly((T - 1) ** exponent, T, domain="ZZ"))

    def to_poly(self) -> Poly:
        return Poly(list(reversed(self.coefficients)) or [0], T, domain="ZZ")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, value: int) -> int:
        return sum(c * value**power for power, c in enumerate(self.coefficients))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return IntPolynomial.from_poly(self.to_poly() - other.to_poly())

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        return IntPolynomial.from_poly(self.to_poly() * other.to_poly())

    def exact_divide(self, divisor: "IntPolynomial") -> "IntPolynomial":
        quotient, remainder = self.to_poly().div(divisor.to_poly())
        if not remainder.is_zero:
            not_divisible_message = f"{self} is not divisible by {divisor}"
            raise ValueError(not_divisible_message)
        return IntPolynomial.from_poly(quotient)

    def unsigned_coefficients(self) -> list[int]:
        """Absolute values of the coefficients from the leading term down."""
        return [abs(c) for c in reversed(self.coefficients)]

    def __str__(self) -> str:
        return str(self.to_poly().as_expr())


@dataclass(frozen=True)
class WedgeSpaceReport:
    p: int
    dimension: int
    ambient: int


@dataclass(frozen=True)
class OsRow:
    p: int
    mu: int
    dimension: int
    match: bool


@dataclass(frozen=True)
class OsIdentityReport:
    ok: bool
    rows: tuple[OsRow, ...]


@dataclass(frozen=True)
class TotallyDisconnectedReport:
    components_of_rank_at_most_one: bool
    no_circuit_of_size_three: bool
    support_is_lineality_space: bool
    top_mu_is_one: bool

    @property
    def consistent(self) -> bool:
        return (
            len(
                {
                    self.components_of_rank_at_most_one,
                    self.no_circuit_of_size_three,
                    self.support_is_lineality_space,
                    self.top_mu_is_one,
                }
            )
            == 1
        )


def mobius_values(matroid: Matroid) -> dict[int, int]:
    """Moebius function mu(cl(empty), F) keyed by flat mask."""

    def build() -> dict[int, int]:
        values: dict[int, int] = {}
        flats = matroid.flats()
        for flat in flats:
            below = [
                values[lower.mask]
                for lower in flats
                if lower.rank < flat.rank and lower.mask & flat.mask == lower.mask
            ]
            values[flat.mask] = 1 if flat.rank == 0 else -sum(below)
        return values

    return matroid.memoize("mobius", build)


def characteristic_polynomial(matroid: Matroid) -> IntPolynomial:
    _require_loop_free(matroid)
    rank = matroid.rank()
    coefficients = [0] * (rank + 1)
    for mask, value in mobius_values(matroid).items():
        coefficients[rank - matroid.rank_mask(mask)] += value
    return IntPolynomial(tuple(coefficients))


def _require_loop_free(matroid: Matroid) -> None:
    if loops := matroid.loops():
        loops_message = (
            f"Characteristic polynomial vanishes for matroids with loops {sorted(loops)}"
        )
        raise LoopError(loops_message)


def reduced(matroid: Matroid) -> IntPolynomial:
    """The reduced characteristic polynomial chi(t) / (t - 1)."""
    return matroid.memoize(
        "reduced_characteristic",
        lambda: characteristic_polynomial(matroid).exact_divide(
            IntPolynomial.t_minus_one_power(1)
        ),
    )


def mu(matroid: Matroid, k: int) -> int:
    """The k-th unsigned coefficient of the reduced characteristic polynomial."""
    coefficients = reduced(matroid).unsigned_coefficients()
    if not 0 <= k < len(coefficients):
        return 0
    return coefficients[k]


def mu_sequence(matroid: Matroid) -> list[int]:
    return reduced(matroid).unsigned_coefficients()


def beta(matroid: Matroid) -> int:
    return (-1) ** (matroid.rank() - 1) * reduced(matroid)(1)


def deletion_contraction_polynomial(matroid: Matroid) -> IntPolynomial:
    """chi_M from chi_(M minus e) - chi_(M / e), simplifying at every step."""
    if matroid.loops():
        return IntPolynomial(())
    simple, _ = simplify(matroid)
    rank = simple.rank()
    for label in simple.labels:
        if simple.rank([other for other in simple.labels if other != label]) == rank:
            return deletion_contraction_polynomial(
                delete(simple, [label])
            ) - deletion_contraction_polynomial(contract(simple, [label]))
    return IntPolynomial.t_minus_one_power(rank)


def wedge(vectors: Sequence[Sequence[Fraction]]) -> dict[tuple[int, ...], Fraction]:
    """Coordinates of v_1 ^ ... ^ v_p in the basis of sorted index tuples."""
    product: dict[tuple[int, ...], Fraction] = {(): Fraction(1)}
    for vector in vectors:
        grown: dict[tuple[int, ...], Fraction] = {}
        for indices, coefficient in product.items():
            for position, entry in enumerate(vector):
                if not entry or position in indices:
                    continue
                sign = (-1) ** sum(1 for i in indices if i > position)
                key = tuple(sorted((*indices, position)))
                grown[key] = grown.get(key, Fraction(0)) + sign * coefficient * entry
        product = {key: value for key, value in grown.items() if value}
    return product


def wedge_span_dimension(fan: Fan, cones: Iterable[frozenset[int]], p: int) -> int:
    """dim of the sum over the given cones of the p-th wedge power of their spans."""
    width = len(fan.labels) - 1
    ambient = math.comb(width, p)
    chosen = list(cones)
    if p == 0:
        return 1 if chosen else 0
    basis = {key: i for i, key in enumerate(itertools.combinations(range(width), p))}
    rows: set[tuple[Fraction, ...]] = set()
    for cone in chosen:
        vectors = [fan.rays[i].vector.reduced() for i in sorted(cone)]
        for subset in itertools.combinations(vectors, p):
            coordinates = wedge(subset)
            if not coordinates:
                continue
            row = [Fraction(0)] * ambient
            for key, value in coordinates.items():
                row[basis[key]] = value
            rows.add(tuple(row))
    linalg.check_size(len(rows), ambient, config.size_cap())
    return linalg.rank(sorted(rows), ambient) if rows else 0


def os_dimension(
    matroid: Matroid, p: int, fan: Fan | None = None
) -> WedgeSpaceReport:
    """Dimension of F_p(B(M)), spanned by p-th wedge powers of the maximal cones."""
    structure = fan if fan is not None else fine_fan(matroid)
    width = matroid.size - 1
    linalg.check_size(1, math.comb(width, p), config.size_cap())
    dimension = wedge_span_dimension(structure, structure.maximal, p)
    return WedgeSpaceReport(p, dimension, math.comb(width, p))


def verify_os_identity(matroid: Matroid) -> OsIdentityReport:
    fan = fine_fan(matroid)
    rows = []
    for p in range(matroid.rank()):
        expected = mu(matroid, p)
        dimension = os_dimension(matroid, p, fan).dimension
        rows.append(OsRow(p, expected, dimension, expected == dimension))
    ok = all(row.match for row in rows)
    if not ok:
        first = next(row for row in rows if not row.match)
        logger.warning(
            "Orlik-Solomon identity fails at p=%s: mu=%s, wedge dimension=%s",
            first.p,
            first.mu,
            first.dimension,
        )
    return OsIdentityReport(ok, tuple(rows))


def totally_disconnected_equivalences(matroid: Matroid) -> TotallyDisconnectedReport:
    rank = matroid.rank()
    return TotallyDisconnectedReport(
        components_of_rank_at_most_one=matroid.is_totally_disconnected(),
        no_circuit_of_size_three=all(
            circuit.bit_count() < 3 for circuit in matroid.circuit_masks()
        ),
        support_is_lineality_space=lineality_dim(matroid) == rank - 1,
        top_mu_is_one=mu(matroid, rank - 1) == 1,
    )
