"""Degrees in Chow rings of matroid fans and the presentation of those rings."""

import itertools
import logging
import math
import random
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from bergmankit import linalg
from bergmankit.fans import Fan, UnsupportedStructureError
from bergmankit.invariants import mu
from bergmankit.matroid import Matroid, is_nontrivial_parallel_connection, minor

logger = logging.getLogger(__name__)

MAX_PARTIAL_MONOMIALS = 200


class DegreeError(ValueError):
    """Exception raised when a monomial does not have the degree an operation needs."""


class NotUnimodularError(Exception):
    """Exception raised when a Chow ring is requested for a non-unimodular fan."""


@dataclass(frozen=True)
class FlagMonomial:
    """A monomial x_(F_1)^(d_1) ... x_(F_k)^(d_k) in the generators of proper flats."""

    flats: tuple[frozenset[str], ...]
    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.flats) != len(self.exponents) or any(e < 1 for e in self.exponents):
            shape_message = "Every flat needs one positive exponent"
            raise ValueError(shape_message)
        if len(set(self.flats)) != len(self.flats):
            repeated_message = "Flats of a monomial must be distinct"
            raise ValueError(repeated_message)
        order = sorted(
            range(len(self.flats)),
            key=lambda i: (len(self.flats[i]), sorted(self.flats[i])),
        )
        object.__setattr__(self, "flats", tuple(self.flats[i] for i in order))
        object.__setattr__(self, "exponents", tuple(self.exponents[i] for i in order))

    @classmethod
    def of(cls, *factors: tuple[Iterable[str], int]) -> "FlagMonomial":
        return cls(
            tuple(frozenset(flat) for flat, _ in factors),
            tuple(exponent for _, exponent in factors),
        )

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def is_chain(self) -> bool:
        return all(a < b for a, b in itertools.pairwise(self.flats))

    def times(self, flat: Iterable[str]) -> "FlagMonomial":
        factor = frozenset(flat)
        if factor in self.flats:
            position = self.flats.index(factor)
            exponents = list(self.exponents)
            exponents[position] += 1
            return FlagMonomial(self.flats, tuple(exponents))
        return FlagMonomial((*self.flats, factor), (*self.exponents, 1))

    def __str__(self) -> str:
        factors = []
        for flat, exponent in zip(self.flats, self.exponents, strict=True):
            name = "x_{" + ",".join(sorted(flat)) + "}"
            factors.append(name if exponent == 1 else f"{name}^{exponent}")
        return " ".join(factors) or "1"


@dataclass(frozen=True)
class ChowPresentation:
    generators: tuple[str, ...]
    non_faces: tuple[tuple[int, ...], ...]
    relations: tuple[tuple[int, ...], ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "generators": list(self.generators),
            "non_faces": [list(face) for face in self.non_faces],
            "relations": [list(relation) for relation in self.relations],
        }


def _minor_mu(
    matroid: Matroid, lower: frozenset[str], upper: frozenset[str], k: int
) -> int:
    if k < 0:
        return 0
    key = ("minor_mu", matroid.ground.mask(lower), matroid.ground.mask(upper), k)
    return matroid.memoize(key, lambda: mu(minor(matroid, lower, upper), k))


def _binomial(upper: int, lower: int) -> int:
    if lower < 0 or upper < 0 or lower > upper:
        return 0
    return math.comb(upper, lower)


def eur_degree(matroid: Matroid, monomial: FlagMonomial) -> int:
    """Degree of a flag monomial in the Chow ring of the fine fan.

    deg = (-1)^(d-k) prod_i binom(d_i - 1, D_i - r_i) mu^(D_i - r_i)(M|F_(i+1) / F_i),
    where D_i = d_1 + ... + d_i, r_i = r(F_i) and F_(k+1) = E. Monomials whose flats
    do not form a chain lie in the non-face ideal and have degree 0.
    """
    top = matroid.rank() - 1
    if monomial.degree != top:
        degree_message = (
            f"Monomial {monomial} has degree {monomial.degree}, expected {top}"
        )
        raise DegreeError(degree_message)
    everything = frozenset(matroid.labels)
    for flat in monomial.flats:
        if not flat or flat == everything or not matroid.is_flat(flat):
            not_proper_message = f"{sorted(flat)} is not a proper nonempty flat"
            raise DegreeError(not_proper_message)
    if not monomial.is_chain():
        logger.debug("Monomial %s is a non-face, degree 0", monomial)
        return 0
    chain = [*monomial.flats, everything]
    result = (-1) ** (top - len(monomial.flats))
    cumulative = 0
    for i, exponent in enumerate(monomial.exponents):
        cumulative += exponent
        shift = cumulative - matroid.rank(chain[i])
        factor = _binomial(exponent - 1, shift)
        if factor == 0:
            return 0
        result *= factor * _minor_mu(matroid, chain[i], chain[i + 1], shift)
        if result == 0:
            return 0
    return result


def relation_annihilation_check(
    matroid: Matroid, partial: FlagMonomial, first: str, second: str
) -> bool:
    """Whether partial * (sum of x_F over F containing first) and the same sum for
    second have equal degree.
    """
    top = matroid.rank() - 1
    if partial.degree != top - 1:
        degree_message = (
            f"Partial monomial {partial} has degree {partial.degree}, expected {top - 1}"
        )
        raise DegreeError(degree_message)

    def side(element: str) -> int:
        return sum(
            eur_degree(matroid, partial.times(flat.elements))
            for flat in matroid.proper_flats()
            if element in flat.elements
        )

    equal = side(first) == side(second)
    if not equal:
        logger.warning(
            "Linear relation for '%s' and '%s' does not annihilate %s",
            first,
            second,
            partial,
        )
    return equal


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    for cuts in itertools.combinations(range(1, total), parts - 1):
        bounds = (0, *cuts, total)
        yield tuple(b - a for a, b in itertools.pairwise(bounds))


def flag_monomials(matroid: Matroid, degree: int) -> Iterator[FlagMonomial]:
    """All chain monomials of the given degree in the proper flats."""
    flats = matroid.proper_flats()

    def chains(prefix: list[int], start: int) -> Iterator[list[int]]:
        if prefix:
            yield prefix
        if len(prefix) == degree:
            return
        for i in range(start, len(flats)):
            if not prefix or (
                flats[prefix[-1]].mask & flats[i].mask == flats[prefix[-1]].mask
                and flats[prefix[-1]].mask != flats[i].mask
            ):
                yield from chains([*prefix, i], i + 1)

    if degree == 0:
        yield FlagMonomial((), ())
        return
    for chain in chains([], 0):
        for exponents in _compositions(degree, len(chain)):
            yield FlagMonomial(tuple(flats[i].elements for i in chain), exponents)


def partial_monomials(
    matroid: Matroid, limit: int = MAX_PARTIAL_MONOMIALS, seed: int = 0
) -> list[FlagMonomial]:
    """Chain monomials of degree r(M) - 2, sampled deterministically above limit."""
    monomials = list(flag_monomials(matroid, matroid.rank() - 2))
    if len(monomials) <= limit:
        return monomials
    return random.Random(seed).sample(monomials, limit)


def coarse_rank3_degree(
    matroid: Matroid, first: Iterable[str], second: Iterable[str]
) -> int:
    """Degree of x_a x_b for rays a, b of the coarse fan of a simple rank 3 matroid.

    Rays are the points k and the rank 2 flats with more than two points.
    """
    if matroid.rank() != 3:
        rank_message = f"Closed forms need a rank 3 matroid, got rank {matroid.rank()}"
        raise DegreeError(rank_message)
    if not matroid.is_simple():
        not_simple_message = "Closed forms need a simple matroid"
        raise DegreeError(not_simple_message)
    if is_nontrivial_parallel_connection(matroid):
        parallel_message = "Coarse structure of a parallel connection is a product fan"
        raise UnsupportedStructureError(parallel_message)
    a, b = frozenset(first), frozenset(second)
    for ray in (a, b):
        if not matroid.is_flat(ray) or not (
            len(ray) == 1 or (matroid.rank(ray) == 2 and len(ray) > 2)
        ):
            not_a_ray_message = f"{sorted(ray)} is not a ray of the coarse fan"
            raise DegreeError(not_a_ray_message)
    if len(a) > len(b):
        a, b = b, a
    if len(a) == 1 and len(b) == 1:
        if a != b:
            return 1 if matroid.closure(a | b).elements == a | b else 0
        return 1 - sum(
            1
            for flat in matroid.flats_of_rank(2)
            if a <= flat.elements and len(flat) > 2
        )
    if len(a) == 1:
        return 1 if a <= b else 0
    return -1 if a == b else 0


def _minimal_non_faces(fan: Fan) -> list[tuple[int, ...]]:
    found: list[tuple[int, ...]] = []
    cones = fan.cones
    for size in range(2, fan.dimension + 2):
        for cone in fan.cones_of_dim(size - 1):
            top = max(cone, default=-1)
            for ray in range(top + 1, len(fan.rays)):
                candidate = cone | {ray}
                if candidate in cones:
                    continue
                if all(candidate - {i} in cones for i in candidate):
                    found.append(tuple(sorted(candidate)))
    return sorted(set(found))


def chow_presentation(fan: Fan) -> ChowPresentation:
    if not fan.is_unimodular():
        not_unimodular_message = "Chow presentation needs a unimodular fan"
        raise NotUnimodularError(not_unimodular_message)
    generators = tuple(
        "x_{" + ",".join(sorted(ray.flat, key=fan.labels.index)) + "}"
        if ray.flat is not None
        else f"x_{index}"
        for index, ray in enumerate(fan.rays)
    )
    relations = tuple(
        tuple(int(ray.vector.coords[i]) for ray in fan.rays)
        for i in range(1, len(fan.labels))
    )
    return ChowPresentation(generators, tuple(_minimal_non_faces(fan)), relations)


def fan_degree(fan: Fan, monomial: Mapping[int, int]) -> int:
    """Degree of a monomial in the ray generators of a unimodular fan.

    A squarefree monomial of a top-dimensional cone has degree 1. A repeated
    generator x_rho is rewritten with a linear relation m that is 1 on rho and 0 on
    the other rays of the monomial's cone.
    """
    if not fan.is_unimodular():
        not_unimodular_message = "Degree map needs a unimodular fan"
        raise NotUnimodularError(not_unimodular_message)
    total = sum(monomial.values())
    if total != fan.dimension:
        degree_message = f"Monomial has degree {total}, expected {fan.dimension}"
        raise DegreeError(degree_message)
    width = len(fan.labels) - 1
    memo: dict[frozenset[tuple[int, int]], Fraction] = {}

    def degree(exponents: dict[int, int]) -> Fraction:
        key = frozenset(exponents.items())
        if key in memo:
            return memo[key]
        support = frozenset(exponents)
        if support not in fan.cones:
            value = Fraction(0)
        elif all(e == 1 for e in exponents.values()):
            value = Fraction(1)
        else:
            repeated = min(ray for ray, e in exponents.items() if e > 1)
            ordered = sorted(support)
            form = linalg.solve(
                [fan.rays[i].vector.reduced() for i in ordered],
                [1 if i == repeated else 0 for i in ordered],
                width,
            )
            if form is None:
                not_independent_message = f"Rays of cone {ordered} are dependent"
                raise NotUnimodularError(not_independent_message)
            value = Fraction(0)
            lowered = dict(exponents)
            lowered[repeated] -= 1
            for ray_index, ray in enumerate(fan.rays):
                if ray_index in support:
                    continue
                pairing = sum(
                    (a * b for a, b in zip(form, ray.vector.reduced(), strict=True)),
                    Fraction(0),
                )
                if pairing == 0 or support | {ray_index} not in fan.cones:
                    continue
                value -= pairing * degree({**lowered, ray_index: 1})
        memo[key] = value
        return value

    result = degree({ray: e for ray, e in monomial.items() if e > 0})
    if result.denominator != 1:
        fractional_message = f"Degree {result} is not an integer"
        raise NotUnimodularError(fractional_message)
    return int(result)


def fan_degree_of_flags(
    fan: Fan, factors: Iterable[tuple[Iterable[str], int]]
) -> int:
    """fan_degree with generators named by their flats."""
    matroid_labels = fan.labels
    exponents: dict[int, int] = {}
    for flat, exponent in factors:
        wanted = frozenset(flat)
        matches = [i for i, ray in enumerate(fan.rays) if ray.flat == wanted]
        if not matches:
            not_a_ray_message = (
                f"{sorted(wanted, key=matroid_labels.index)} is not a ray of the fan"
            )
            raise DegreeError(not_a_ray_message)
        exponents[matches[0]] = exponents.get(matches[0], 0) + exponent
    return fan_degree(fan, exponents)
