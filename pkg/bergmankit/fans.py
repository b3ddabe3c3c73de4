"""Bergman fans B(M) in R^E / R1: support membership and the fine, nested and coarse
fan structures, together with star fans and support sampling.

Points are QuotientVectors, canonicalized so that the coordinate of the first ground
element is zero. A flat F contributes the ray v_F, the indicator vector of F.
"""

import itertools
import logging
import random
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any

from bergmankit import linalg
from bergmankit.matroid import (
    Matroid,
    bits,
    contract,
    direct_sum,
    minor,
    restrict,
)

logger = logging.getLogger(__name__)

FINE = "fine"
NESTED = "nested"
COARSE = "coarse"
PRODUCT = "product"
STRUCTURES = (FINE, NESTED, COARSE, PRODUCT)


class UnsupportedStructureError(Exception):
    """Exception raised when a fan structure is not available for a matroid."""


class NotAChainError(ValueError):
    """Exception raised when a flag of flats is not a strictly increasing chain."""


@dataclass(frozen=True)
class QuotientVector:
    """A vector modulo the all-ones line, stored with coords[0] == 0."""

    coords: tuple[Fraction, ...]

    @classmethod
    def of(cls, values: Iterable[int | Fraction]) -> "QuotientVector":
        lifted = [Fraction(value) for value in values]
        if not lifted:
            return cls(())
        shift = lifted[0]
        return cls(tuple(value - shift for value in lifted))

    @classmethod
    def zero(cls, length: int) -> "QuotientVector":
        return cls(tuple(Fraction(0) for _ in range(length)))

    @classmethod
    def indicator(cls, labels: Sequence[str], subset: Iterable[str]) -> "QuotientVector":
        chosen = set(subset)
        return cls.of(1 if label in chosen else 0 for label in labels)

    def __len__(self) -> int:
        return len(self.coords)

    def __add__(self, other: "QuotientVector") -> "QuotientVector":
        pairs = zip(self.coords, other.coords, strict=True)
        return QuotientVector(tuple(a + b for a, b in pairs))

    def __sub__(self, other: "QuotientVector") -> "QuotientVector":
        pairs = zip(self.coords, other.coords, strict=True)
        return QuotientVector(tuple(a - b for a, b in pairs))

    def __neg__(self) -> "QuotientVector":
        return QuotientVector(tuple(-a for a in self.coords))

    def scaled(self, factor: int | Fraction) -> "QuotientVector":
        return QuotientVector(tuple(factor * a for a in self.coords))

    def reduced(self) -> tuple[Fraction, ...]:
        """Coordinates in the basis of R^E / R1 given by the images of e_1..e_(n-1)."""
        return self.coords[1:]

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_integral(self) -> bool:
        return all(value.denominator == 1 for value in self.coords)

    def as_ints(self) -> list[int]:
        if not self.is_integral():
            not_integral_message = f"Vector {self} is not integral"
            raise ValueError(not_integral_message)
        return [int(value) for value in self.coords]

    def to_json(self) -> list[int | str]:
        return [int(v) if v.denominator == 1 else str(v) for v in self.coords]

    def __str__(self) -> str:
        return "(" + ", ".join(str(value) for value in self.coords) + ")"


@dataclass(frozen=True)
class Ray:
    vector: QuotientVector
    flat: frozenset[str] | None = None
    rank: int | None = None
    factor: int | None = None


@dataclass(frozen=True)
class Fan:
    """A simplicial fan given by its rays and maximal cones.

    Cones are frozensets of ray indices; the empty cone and every face of a maximal
    cone are cones of the fan.
    """

    labels: tuple[str, ...]
    rays: tuple[Ray, ...]
    maximal: tuple[frozenset[int], ...]
    structure: str
    data: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.structure not in STRUCTURES:
            structure_message = f"Unknown fan structure '{self.structure}'"
            raise ValueError(structure_message)

    @cached_property
    def cones(self) -> frozenset[frozenset[int]]:
        faces: set[frozenset[int]] = set()
        for cone in self.maximal:
            for size in range(len(cone) + 1):
                faces.update(
                    frozenset(c) for c in itertools.combinations(sorted(cone), size)
                )
        return frozenset(faces)

    @cached_property
    def _ray_lookup(self) -> dict[QuotientVector, int]:
        return {ray.vector: index for index, ray in enumerate(self.rays)}

    def ray_index(self, vector: QuotientVector) -> int | None:
        return self._ray_lookup.get(vector)

    def is_cone(self, ray_ids: Iterable[int]) -> bool:
        return frozenset(ray_ids) in self.cones

    def cones_of_dim(self, dimension: int) -> list[frozenset[int]]:
        return sorted(
            (cone for cone in self.cones if len(cone) == dimension), key=sorted
        )

    def maximal_cones(self) -> list[frozenset[int]]:
        return sorted(self.maximal, key=sorted)

    @property
    def dimension(self) -> int:
        return max((len(cone) for cone in self.maximal), default=0)

    def is_pure(self) -> bool:
        return len({len(cone) for cone in self.maximal}) <= 1

    def generator_rows(self, cone: Iterable[int]) -> list[list[int]]:
        return [
            [int(v) for v in self.rays[i].vector.reduced()] for i in sorted(cone)
        ]

    @cached_property
    def _unimodular(self) -> bool:
        return all(
            linalg.has_unit_invariant_factors(self.generator_rows(cone))
            for cone in self.maximal
        )

    def is_unimodular(self) -> bool:
        return self._unimodular

    def cone_coordinates(
        self, cone: Iterable[int], point: QuotientVector
    ) -> list[Fraction] | None:
        """Coefficients of point in the cone's generators, or None outside its span."""
        ordered = sorted(cone)
        if not ordered:
            return [] if point.is_zero() else None
        columns = [self.rays[i].vector.reduced() for i in ordered]
        rows = [
            [column[j] for column in columns] for j in range(len(self.labels) - 1)
        ]
        solution = linalg.solve(rows, point.reduced(), len(ordered))
        if solution is None:
            return None
        recombined = QuotientVector.zero(len(self.labels))
        for coefficient, i in zip(solution, ordered, strict=True):
            recombined += self.rays[i].vector.scaled(coefficient)
        return solution if recombined == point else None

    def locate(self, point: QuotientVector) -> frozenset[int] | None:
        """A maximal cone containing point, or None if point is off the support."""
        for cone in self.maximal_cones():
            coefficients = self.cone_coordinates(cone, point)
            if coefficients is not None and all(c >= 0 for c in coefficients):
                return cone
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "labels": list(self.labels),
            "rays": [
                {
                    "coords": ray.vector.to_json(),
                    "flat": sorted(ray.flat, key=self.labels.index)
                    if ray.flat is not None
                    else None,
                    "rank": ray.rank,
                }
                for ray in self.rays
            ],
            "cones": [sorted(cone) for cone in self.maximal_cones()],
            "structure": self.structure,
        }

    @classmethod
    def from_dict(cls, document: Mapping[str, Any]) -> "Fan":
        return cls(
            tuple(document["labels"]),
            tuple(
                Ray(
                    QuotientVector.of(Fraction(value) for value in ray["coords"]),
                    frozenset(ray["flat"]) if ray.get("flat") is not None else None,
                    ray.get("rank"),
                )
                for ray in document["rays"]
            ),
            tuple(frozenset(cone) for cone in document["cones"]),
            document["structure"],
        )


@dataclass(frozen=True)
class LocalMatroid:
    flag: tuple[frozenset[str], ...]
    minors: tuple[Matroid, ...]
    matroid: Matroid


@dataclass(frozen=True)
class SupportReport:
    ok: bool
    on_support: int
    off_support: int
    failures: tuple[QuotientVector, ...] = ()


@dataclass(frozen=True)
class StarReport:
    ok: bool
    checked: int
    failures: tuple[QuotientVector, ...] = ()


def vector_of(matroid: Matroid, values: Mapping[str, int | Fraction]) -> QuotientVector:
    return QuotientVector.of(values.get(label, 0) for label in matroid.labels)


def membership(
    matroid: Matroid, point: QuotientVector | Sequence[int | Fraction]
) -> bool:
    """Whether the minimum over every circuit is attained at least twice."""
    matroid.require_loop_free()
    coords = point.coords if isinstance(point, QuotientVector) else tuple(point)
    if len(coords) != matroid.size:
        length_message = f"Point has {len(coords)} coordinates, expected {matroid.size}"
        raise ValueError(length_message)
    for circuit in matroid.circuit_masks():
        values = [coords[i] for i in bits(circuit)]
        if values.count(min(values)) < 2:
            return False
    return True


def _flat_ray(matroid: Matroid, flat: frozenset[str], rank: int) -> Ray:
    return Ray(QuotientVector.indicator(matroid.labels, flat), flat, rank)


def flat_of_ray(
    matroid: Matroid, vector: QuotientVector
) -> tuple[frozenset[str], int] | None:
    """The flat F with vector == v_F, when there is one."""
    values = sorted(set(vector.coords))
    if len(values) != 2 or values[1] - values[0] != 1:
        return None
    top = frozenset(
        label
        for label, value in zip(matroid.labels, vector.coords, strict=True)
        if value == values[1]
    )
    if not matroid.is_flat(top):
        return None
    return top, matroid.rank(top)


def _maximal_chains(matroid: Matroid) -> Iterator[list[int]]:
    lattice = matroid.flats_lattice()
    top_rank = matroid.rank() - 1

    def walk(chain: list[int]) -> Iterator[list[int]]:
        if len(chain) == top_rank:
            yield chain
            return
        for upper in lattice.covers[chain[-1] if chain else lattice.bottom.mask]:
            yield from walk([*chain, upper])

    if top_rank <= 0:
        yield []
        return
    yield from walk([])


def fine_fan(matroid: Matroid) -> Fan:
    """The fan structure whose cones are spanned by flags of proper flats."""
    matroid.require_loop_free()
    flats = matroid.proper_flats()
    index = {flat.mask: i for i, flat in enumerate(flats)}
    rays = tuple(_flat_ray(matroid, flat.elements, flat.rank) for flat in flats)
    maximal = tuple(
        frozenset(index[mask] for mask in chain) for chain in _maximal_chains(matroid)
    )
    logger.debug(
        "Built fine fan with %s rays and %s maximal cones", len(rays), len(maximal)
    )
    return Fan(matroid.labels, rays, maximal, FINE)


def connected_flats(matroid: Matroid) -> list[tuple[int, int]]:
    """Masks and ranks of the proper nonempty flats F with M|F connected."""
    return [
        (flat.mask, flat.rank)
        for flat in matroid.proper_flats()
        if restrict(matroid, flat.elements).is_connected()
    ]


def nested_fan(matroid: Matroid) -> Fan:
    """The minimal nested set structure, built on the connected flats.

    A collection of connected flats is nested when every antichain of two or more
    of its members has a disconnected closure of the union.
    """
    matroid.require_loop_free()
    if not matroid.is_connected():
        disconnected_message = (
            "Nested set structure needs a connected matroid; "
            f"components are {[sorted(c) for c in matroid.connected_components()]}"
        )
        raise UnsupportedStructureError(disconnected_message)
    building = connected_flats(matroid)
    join_connected: dict[int, bool] = {}

    def join_is_connected(masks: Sequence[int]) -> bool:
        union = 0
        for mask in masks:
            union |= mask
        closed = matroid.closure_mask(union)
        if closed not in join_connected:
            join_connected[closed] = restrict(
                matroid, matroid.ground.labels_of(closed)
            ).is_connected()
        return join_connected[closed]

    def compatible(chosen: Sequence[int], candidate: int) -> bool:
        new_mask = building[candidate][0]
        incomparable = [
            building[i][0]
            for i in chosen
            if building[i][0] & new_mask not in (building[i][0], new_mask)
        ]
        for size in range(1, len(incomparable) + 1):
            for subset in itertools.combinations(incomparable, size):
                if not _is_antichain(subset):
                    continue
                if join_is_connected([*subset, new_mask]):
                    return False
        return True

    nested: list[frozenset[int]] = []

    def extend(chosen: list[int], start: int) -> None:
        grew = False
        for candidate in range(start, len(building)):
            if compatible(chosen, candidate):
                grew = True
                extend([*chosen, candidate], candidate + 1)
        if not grew:
            nested.append(frozenset(chosen))

    extend([], 0)
    maximal = tuple(
        cone for cone in nested if not any(cone < other for other in nested)
    )
    rays = tuple(
        _flat_ray(matroid, matroid.ground.labels_of(mask), rank)
        for mask, rank in building
    )
    logger.debug(
        "Built nested fan with %s rays and %s maximal cones", len(rays), len(maximal)
    )
    return Fan(matroid.labels, rays, tuple(sorted(set(maximal), key=sorted)), NESTED)


def _is_antichain(masks: Sequence[int]) -> bool:
    return all(
        a & b not in (a, b) for a, b in itertools.combinations(masks, 2)
    )


def coarse_criterion_witness(
    matroid: Matroid,
) -> tuple[frozenset[str], frozenset[str]] | None:
    """A pair of flats F < G, G connected, with M|G/F disconnected, or None."""
    candidates = [*connected_flats(matroid), (matroid.ground.full_mask, matroid.rank())]
    flats = [flat.mask for flat in matroid.proper_flats()]
    for upper, _ in candidates:
        for lower in flats:
            if lower & upper != lower or lower == upper:
                continue
            quotient = minor(
                matroid, matroid.ground.labels_of(lower), matroid.ground.labels_of(upper)
            )
            if not quotient.is_connected():
                return matroid.ground.labels_of(lower), matroid.ground.labels_of(upper)
    return None


def coarse_fan(matroid: Matroid) -> Fan:
    """The coarse fan structure, when it is one of the two known cases.

    Either the nested structure is already coarse, or M is a non-trivial parallel
    connection and the coarse structure is the product of the factors' structures.
    """
    matroid.require_loop_free()
    if not matroid.is_simple():
        not_simple_message = "Coarse structure needs a simple matroid"
        raise UnsupportedStructureError(not_simple_message)
    if not matroid.is_connected():
        disconnected_message = "Coarse structure needs a connected matroid"
        raise UnsupportedStructureError(disconnected_message)
    witness = coarse_criterion_witness(matroid)
    if witness is None:
        nested = nested_fan(matroid)
        return Fan(nested.labels, nested.rays, nested.maximal, COARSE)
    for point in matroid.labels:
        contracted = contract(matroid, [point])
        if contracted.is_connected():
            continue
        components = contracted.connected_components()
        first_part = components[0] | {point}
        second_part = frozenset().union(*components[1:]) | {point}
        first = coarse_fan(restrict(matroid, first_part))
        second = coarse_fan(restrict(matroid, second_part))
        return product_fan(matroid, point, first, second)
    lower, upper = witness
    unsupported_message = (
        "Coarse structure unsupported: "
        f"M|{sorted(upper)}/{sorted(lower)} is disconnected and M is not a "
        "non-trivial parallel connection"
    )
    raise UnsupportedStructureError(unsupported_message)


def pull_back(
    labels: Sequence[str],
    point: str,
    factor_labels: Sequence[str],
    vector: QuotientVector,
) -> QuotientVector:
    """Send a vector of a factor's ambient space to R^E / R1, normalized to 0 at point."""
    values = dict(zip(factor_labels, vector.coords, strict=True))
    base = values[point]
    return QuotientVector.of(values.get(label, base) - base for label in labels)


def product_fan(matroid: Matroid, point: str, first: Fan, second: Fan) -> Fan:
    """Pull back the product of two factor fans of a parallel connection along point."""
    rays: list[Ray] = []
    offsets = []
    for factor, fan in enumerate((first, second)):
        offsets.append(len(rays))
        for ray in fan.rays:
            vector = pull_back(matroid.labels, point, fan.labels, ray.vector)
            metadata = flat_of_ray(matroid, vector)
            rays.append(
                Ray(
                    vector,
                    metadata[0] if metadata else None,
                    metadata[1] if metadata else None,
                    factor,
                )
            )
    maximal = tuple(
        frozenset(offsets[0] + i for i in a) | frozenset(offsets[1] + j for j in b)
        for a in first.maximal_cones()
        for b in second.maximal_cones()
    )
    logger.debug(
        "Built product fan along '%s' with %s rays and %s maximal cones",
        point,
        len(rays),
        len(maximal),
    )
    return Fan(matroid.labels, tuple(rays), maximal, PRODUCT, {"point": point})


def _validated_flag(
    matroid: Matroid, flag: Sequence[Iterable[str]]
) -> list[frozenset[str]]:
    chain = [frozenset(flat) for flat in flag]
    previous: frozenset[str] = frozenset()
    everything = frozenset(matroid.labels)
    for flat in chain:
        if not flat or flat == everything or not matroid.is_flat(flat):
            not_proper_message = f"{sorted(flat)} is not a proper nonempty flat"
            raise NotAChainError(not_proper_message)
        if not previous < flat:
            not_increasing_message = (
                f"Flag is not strictly increasing at {sorted(previous)} -> {sorted(flat)}"
            )
            raise NotAChainError(not_increasing_message)
        previous = flat
    return chain


def star(matroid: Matroid, flag: Sequence[Iterable[str]]) -> LocalMatroid:
    """The local matroid at the flag cone: the direct sum of M|F_i / F_(i-1)."""
    chain = [frozenset(), *_validated_flag(matroid, flag), frozenset(matroid.labels)]
    minors = tuple(
        minor(matroid, lower, upper) for lower, upper in itertools.pairwise(chain)
    )
    total = minors[0]
    for part in minors[1:]:
        total = direct_sum(total, part)
    return LocalMatroid(tuple(chain), minors, total)


def lineality_dim(matroid: Matroid) -> int:
    return len(matroid.connected_components()) - 1


def ray_rank_profile(fan: Fan) -> dict[int | None, int]:
    profile: dict[int | None, int] = {}
    for ray in fan.rays:
        profile[ray.rank] = profile.get(ray.rank, 0) + 1
    return dict(sorted(profile.items(), key=lambda item: (item[0] is None, item[0] or 0)))


def flag_of_vector(
    matroid: Matroid, point: QuotientVector
) -> list[frozenset[str]] | None:
    """The flag whose cone holds point in its relative interior, from its level sets.

    Returns None when some level set is not a flat, i.e. point is off the support.
    """
    levels = sorted(set(point.coords), reverse=True)
    flag = []
    for threshold in levels[:-1]:
        upper = frozenset(
            label
            for label, value in zip(matroid.labels, point.coords, strict=True)
            if value >= threshold
        )
        if not matroid.is_flat(upper):
            return None
        flag.append(upper)
    return flag


def random_weight(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 50), rng.randint(1, 5))


def sample_cone_points(
    fan: Fan, cone: Iterable[int], count: int, rng: random.Random
) -> list[QuotientVector]:
    """Deterministic points in the relative interior of a cone."""
    ordered = sorted(cone)
    points = []
    for _ in range(count):
        point = QuotientVector.zero(len(fan.labels))
        for i in ordered:
            point += fan.rays[i].vector.scaled(random_weight(rng))
        points.append(point)
    return points


def random_support_point(matroid: Matroid, rng: random.Random) -> QuotientVector:
    """A point of B(M) from a random maximal flag with random positive weights."""
    lattice = matroid.flats_lattice()
    point = QuotientVector.zero(matroid.size)
    current = lattice.bottom.mask
    for _ in range(matroid.rank() - 1):
        current = rng.choice(lattice.covers[current])
        flat = matroid.ground.labels_of(current)
        point += QuotientVector.indicator(matroid.labels, flat).scaled(random_weight(rng))
    return point


def random_point(length: int, rng: random.Random, spread: int = 3) -> QuotientVector:
    return QuotientVector.of(rng.randint(-spread, spread) for _ in range(length))


def support_check(
    matroid: Matroid, fan: Fan, samples: int, seed: int = 0
) -> SupportReport:
    """Compare membership in B(M) with the fan's support on sampled points.

    Interior points of every maximal cone must pass membership, and random points as
    well as perturbed interior points must pass membership exactly when the fan
    contains them.
    """
    rng = random.Random(seed)
    failures: list[QuotientVector] = []
    on_support = 0
    off_support = 0
    for cone in fan.maximal_cones():
        for point in sample_cone_points(fan, cone, samples, rng):
            on_support += 1
            if not membership(matroid, point):
                failures.append(point)
            perturbed = point + random_point(matroid.size, rng).scaled(Fraction(1, 7))
            candidates = [perturbed, random_point(matroid.size, rng)]
            for candidate in candidates:
                inside = fan.locate(candidate) is not None
                if inside:
                    on_support += 1
                else:
                    off_support += 1
                if inside != membership(matroid, candidate):
                    failures.append(candidate)
    if failures:
        logger.warning(
            "Support check failed on %s points, first %s", len(failures), failures[0]
        )
    return SupportReport(not failures, on_support, off_support, tuple(failures))


def star_membership_consistent(
    matroid: Matroid, flag: Sequence[Iterable[str]], samples: int, seed: int = 0
) -> StarReport:
    """Membership in the star's Bergman fan against membership of w + delta x in B(M).

    w is a relative-interior point of the flag cone and delta is small enough that
    w + delta x keeps the strict order of the levels of w.
    """
    local = star(matroid, flag)
    rng = random.Random(seed)
    chain = local.flag[1:-1]
    base = QuotientVector.zero(matroid.size)
    for flat in chain:
        base += QuotientVector.indicator(matroid.labels, flat)
    failures = []
    for round_index in range(samples):
        if round_index % 2:
            local_point = random_point(local.matroid.size, rng)
        else:
            local_point = random_support_point(local.matroid, rng)
        values = dict(zip(local.matroid.labels, local_point.coords, strict=True))
        direction = vector_of(matroid, values)
        spread = max((abs(value) for value in direction.coords), default=Fraction(0))
        delta = Fraction(1, 4 * (int(spread) + 1))
        shifted = base + direction.scaled(delta)
        if membership(local.matroid, local_point) != membership(matroid, shifted):
            failures.append(local_point)
    if failures:
        logger.warning(
            "Star consistency failed on %s of %s samples", len(failures), samples
        )
    return StarReport(not failures, samples, tuple(failures))
