"""Integer-linear maps between Bergman fans.

A LatticeMap is an integer matrix sending the all-ones vector to a multiple of the
all-ones vector, so it descends to the quotients R^E / R1. Maps are built from matroid
isomorphisms, Cremona bases and parallel connections, and verified cone by cone.
"""

import itertools
import logging
import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from sympy.combinatorics import Permutation, PermutationGroup

from bergmankit import linalg
from bergmankit.fans import (
    Fan,
    QuotientVector,
    fine_fan,
    membership,
    pull_back,
    random_point,
    random_support_point,
    sample_cone_points,
)
from bergmankit.matroid import Matroid, rank_preservation_witness

logger = logging.getLogger(__name__)

MIN_SPLIT_SAMPLES = 50


class LatticeMapError(ValueError):
    """Exception raised when a matrix does not define the requested lattice map."""


class NotABasisError(ValueError):
    """Exception raised when a set of labels is not a basis of the matroid."""


class CremonaCriterionError(Exception):
    """Exception raised when a Cremona map is requested for a failing basis."""


class NotAParallelConnectionError(Exception):
    """Exception raised when a matroid carries no parallel connection data."""


@dataclass(frozen=True)
class LatticeMap:
    """Matrix rows are indexed by target labels, columns by source labels."""

    source_labels: tuple[str, ...]
    target_labels: tuple[str, ...]
    matrix: tuple[tuple[int, ...], ...]
    ones_multiplier: int

    def __post_init__(self) -> None:
        if len(self.matrix) != len(self.target_labels) or any(
            len(row) != len(self.source_labels) for row in self.matrix
        ):
            shape_message = (
                f"Matrix must be {len(self.target_labels)} x {len(self.source_labels)}"
            )
            raise LatticeMapError(shape_message)
        if self.ones_multiplier == 0:
            zero_multiplier_message = "Map sends the all-ones vector to zero"
            raise LatticeMapError(zero_multiplier_message)
        sums = {sum(row) for row in self.matrix}
        if sums != {self.ones_multiplier}:
            ones_line_message = (
                f"Row sums {sorted(sums)} do not equal the ones multiplier "
                f"{self.ones_multiplier}"
            )
            raise LatticeMapError(ones_line_message)

    @classmethod
    def from_quotient_matrix(
        cls,
        source_labels: Sequence[str],
        target_labels: Sequence[str],
        quotient: Sequence[Sequence[int | Fraction]],
    ) -> "LatticeMap":
        """Lift a map of reduced coordinates to a matrix with ones multiplier 1."""
        reduced_size = len(target_labels) - 1
        columns = [[0] * len(target_labels)]
        for i in range(1, len(source_labels)):
            columns.append([0, *(int(quotient[j][i - 1]) for j in range(reduced_size))])
        for j in range(len(target_labels)):
            columns[0][j] = 1 - sum(column[j] for column in columns[1:])
        matrix = tuple(
            tuple(column[j] for column in columns) for j in range(len(target_labels))
        )
        return cls(tuple(source_labels), tuple(target_labels), matrix, 1)

    def apply(self, vector: QuotientVector) -> QuotientVector:
        return QuotientVector.of(
            sum(
                (entry * value for entry, value in zip(row, vector.coords, strict=True)),
                Fraction(0),
            )
            for row in self.matrix
        )

    def quotient_matrix(self) -> list[list[Fraction]]:
        """The induced map on reduced coordinates, as a matrix acting on columns."""
        images = []
        size = len(self.source_labels)
        for i in range(1, size):
            basis = QuotientVector.of(1 if j == i else 0 for j in range(size))
            images.append(self.apply(basis).reduced())
        return [
            [images[i][j] for i in range(len(images))]
            for j in range(len(self.target_labels) - 1)
        ]

    def compose(self, first: "LatticeMap") -> "LatticeMap":
        """The map applying `first` and then self."""
        if first.target_labels != self.source_labels:
            mismatch_message = "Cannot compose maps with mismatched ambient spaces"
            raise LatticeMapError(mismatch_message)
        matrix = tuple(
            tuple(
                sum(row[k] * first.matrix[k][j] for k in range(len(row)))
                for j in range(len(first.source_labels))
            )
            for row in self.matrix
        )
        return LatticeMap(
            first.source_labels,
            self.target_labels,
            matrix,
            self.ones_multiplier * first.ones_multiplier,
        )

    def quotient_determinant(self) -> Fraction:
        quotient = self.quotient_matrix()
        if len(quotient) != len(self.source_labels) - 1:
            not_square_message = "Quotient matrix is not square"
            raise LatticeMapError(not_square_message)
        return linalg.determinant(quotient)

    def is_quotient_unimodular(self) -> bool:
        try:
            return abs(self.quotient_determinant()) == 1
        except LatticeMapError:
            return False

    def inverse(self) -> "LatticeMap":
        if not self.is_quotient_unimodular():
            not_unimodular_message = "Map is not invertible over the integers"
            raise LatticeMapError(not_unimodular_message)
        inverted = linalg.inverse(self.quotient_matrix())
        return LatticeMap.from_quotient_matrix(
            self.target_labels, self.source_labels, inverted
        )

    def is_identity_on_quotient(self) -> bool:
        quotient = self.quotient_matrix()
        return self.source_labels == self.target_labels and all(
            quotient[j][i] == (1 if i == j else 0)
            for j in range(len(quotient))
            for i in range(len(quotient[j]))
        )

    def is_involution(self) -> bool:
        return self.compose(self).is_identity_on_quotient()

    def to_dict(self) -> dict[str, Any]:
        return {
            "source": list(self.source_labels),
            "target": list(self.target_labels),
            "matrix": [list(row) for row in self.matrix],
            "ones_multiplier": self.ones_multiplier,
        }

    @classmethod
    def from_dict(cls, document: Mapping[str, Any]) -> "LatticeMap":
        try:
            return cls(
                tuple(document["source"]),
                tuple(document["target"]),
                tuple(tuple(int(v) for v in row) for row in document["matrix"]),
                int(document["ones_multiplier"]),
            )
        except (KeyError, TypeError) as error:
            malformed_message = f"Malformed map document: missing or invalid {error}"
            raise LatticeMapError(malformed_message) from None


@dataclass(frozen=True)
class RayPermutation:
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(len(self.images))):
            not_bijective_message = f"{self.images} is not a permutation"
            raise ValueError(not_bijective_message)

    @classmethod
    def identity(cls, size: int) -> "RayPermutation":
        return cls(tuple(range(size)))

    def __call__(self, ray: int) -> int:
        return self.images[ray]

    def after(self, first: "RayPermutation") -> "RayPermutation":
        return RayPermutation(tuple(self.images[i] for i in first.images))

    def cone_image(self, cone: Iterable[int]) -> frozenset[int]:
        return frozenset(self.images[i] for i in cone)


@dataclass(frozen=True)
class CremonaCriterion:
    holds: bool
    partition: tuple[frozenset[str], ...]
    witness: str | None = None


@dataclass(frozen=True)
class SupportPreservationReport:
    ok: bool
    checked: int
    failures: tuple[QuotientVector, ...] = ()


@dataclass(frozen=True)
class IsomorphismReport:
    ok: bool
    ray_images: tuple[int, ...] | None
    failures: tuple[str, ...] = ()


@dataclass(frozen=True)
class SplitReport:
    ok: bool
    forward_on: int
    forward_off: int
    backward_on: int
    backward_off: int
    failures: tuple[str, ...] = ()


@dataclass(frozen=True)
class ParallelSplit:
    """The splitting map of a parallel connection into the product of its factors."""

    matroid: Matroid
    first_factor: Matroid
    second_factor: Matroid
    first_point: str
    second_point: str
    point: str
    first: LatticeMap
    second: LatticeMap

    def apply(self, vector: QuotientVector) -> tuple[QuotientVector, QuotientVector]:
        return self.first.apply(vector), self.second.apply(vector)

    def inverse_apply(
        self, first: QuotientVector, second: QuotientVector
    ) -> QuotientVector:
        labels = self.matroid.labels
        return pull_back(
            labels, self.point, self._glued(self.first_factor, self.first_point), first
        ) + pull_back(
            labels,
            self.point,
            self._glued(self.second_factor, self.second_point),
            second,
        )

    def _glued(self, factor: Matroid, gluing: str) -> list[str]:
        return [self.point if label == gluing else label for label in factor.labels]

    def in_product_support(self, first: QuotientVector, second: QuotientVector) -> bool:
        return membership(self.first_factor, first) and membership(
            self.second_factor, second
        )


def from_matroid_iso(
    bijection: Mapping[str, str], source: Matroid, target: Matroid
) -> LatticeMap:
    if sorted(bijection) != sorted(source.labels) or sorted(
        bijection.values()
    ) != sorted(target.labels):
        not_bijection_message = "Label map is not a bijection between the ground sets"
        raise LatticeMapError(not_bijection_message)
    if (witness := rank_preservation_witness(bijection, source, target)) is not None:
        rank_message = f"Label map changes the rank of {sorted(witness)}"
        raise LatticeMapError(rank_message)
    column = {label: i for i, label in enumerate(source.labels)}
    inverse = {image: label for label, image in bijection.items()}
    matrix = tuple(
        tuple(1 if i == column[inverse[label]] else 0 for i in range(source.size))
        for label in target.labels
    )
    return LatticeMap(source.labels, target.labels, matrix, 1)


def _require_basis(matroid: Matroid, basis: Sequence[str]) -> None:
    if not matroid.is_basis(basis):
        not_basis_message = f"{sorted(basis)} is not a basis"
        raise NotABasisError(not_basis_message)


def cremona_criterion(matroid: Matroid, basis: Sequence[str]) -> CremonaCriterion:
    """Whether the residues cl{b_i, b_j} minus {b_i, b_j} partition E minus b."""
    if not matroid.is_simple():
        not_simple_message = "Cremona criterion needs a simple matroid"
        raise ValueError(not_simple_message)
    _require_basis(matroid, basis)
    chosen = frozenset(basis)
    residues = []
    ordered = sorted(chosen, key=matroid.labels.index)
    for first, second in itertools.combinations(ordered, 2):
        residues.append(matroid.closure([first, second]).elements - {first, second})
    covered: set[str] = set()
    for residue in residues:
        if overlap := covered & residue:
            return CremonaCriterion(
                holds=False,
                partition=tuple(residues),
                witness=f"residues overlap in {sorted(overlap)}",
            )
        covered |= residue
    missing = set(matroid.labels) - chosen - covered
    if missing:
        return CremonaCriterion(
            holds=False,
            partition=tuple(residues),
            witness=f"residues miss {sorted(missing, key=matroid.labels.index)}",
        )
    return CremonaCriterion(holds=True, partition=tuple(residues))


def cremona_matrix(matroid: Matroid, basis: Sequence[str]) -> list[list[int]]:
    """Identity outside b, and column b_j the indicator of cl(b minus b_j)."""
    _require_basis(matroid, basis)
    chosen = set(basis)
    columns = []
    for label in matroid.labels:
        if label in chosen:
            flat = matroid.closure(chosen - {label}).elements
            columns.append([1 if other in flat else 0 for other in matroid.labels])
        else:
            columns.append([1 if other == label else 0 for other in matroid.labels])
    return [[column[j] for column in columns] for j in range(matroid.size)]


def cremona_map(matroid: Matroid, basis: Sequence[str]) -> LatticeMap:
    criterion = cremona_criterion(matroid, basis)
    if not criterion.holds:
        criterion_message = (
            f"Cremona criterion fails for basis {sorted(basis)}: {criterion.witness}"
        )
        raise CremonaCriterionError(criterion_message)
    matrix = tuple(tuple(row) for row in cremona_matrix(matroid, basis))
    return LatticeMap(matroid.labels, matroid.labels, matrix, matroid.rank() - 1)


def negation_map(labels: Sequence[str]) -> LatticeMap:
    """The Cremona map of the whole ground set of a free matroid, v -> -v."""
    size = len(labels)
    matrix = tuple(
        tuple(-1 if i == j else 0 for i in range(size)) for j in range(size)
    )
    return LatticeMap(tuple(labels), tuple(labels), matrix, -1)


def preserves_support(
    lattice_map: LatticeMap,
    source: Matroid,
    target: Matroid,
    samples: int,
    seed: int = 0,
) -> SupportPreservationReport:
    """Map generators and interior points of every maximal fine cone into the target."""
    fan = fine_fan(source)
    rng = random.Random(seed)
    failures: list[QuotientVector] = []
    checked = 0
    for cone in fan.maximal_cones():
        points = [fan.rays[i].vector for i in sorted(cone)]
        points += sample_cone_points(fan, cone, samples, rng)
        for point in points:
            checked += 1
            image = lattice_map.apply(point)
            if not membership(target, image):
                failures.append(point)
    if failures:
        logger.warning(
            "Map sends %s of %s sampled support points off the target support, first %s",
            len(failures),
            checked,
            failures[0],
        )
    return SupportPreservationReport(not failures, checked, tuple(failures))


def cremona_support_verdict(
    matroid: Matroid, basis: Sequence[str], samples: int, seed: int = 0
) -> bool:
    """Support preservation of the Cremona matrix, without consulting the criterion."""
    matrix = cremona_matrix(matroid, basis)
    sums = {sum(row) for row in matrix}
    if len(sums) != 1:
        logger.debug(
            "Cremona matrix for %s does not preserve the ones line", sorted(basis)
        )
        return False
    try:
        lattice_map = LatticeMap(
            matroid.labels, matroid.labels, tuple(tuple(r) for r in matrix), sums.pop()
        )
    except LatticeMapError:
        return False
    return preserves_support(lattice_map, matroid, matroid, samples, seed).ok


def parallel_split_map(matroid: Matroid) -> ParallelSplit:
    provenance = matroid.provenance
    if provenance.kind != "parallel_connection" or len(provenance.parents) != 2:
        missing_gluing_message = (
            f"Matroid of kind '{provenance.kind}' carries no parallel connection data"
        )
        raise NotAParallelConnectionError(missing_gluing_message)
    first_factor, second_factor = provenance.parents
    first_point = provenance.data["first_point"]
    second_point = provenance.data["second_point"]
    point = provenance.data["point"]

    def projection(factor: Matroid, gluing: str) -> LatticeMap:
        column = {label: i for i, label in enumerate(matroid.labels)}
        matrix = tuple(
            tuple(
                1 if i == column[point if label == gluing else label] else 0
                for i in range(matroid.size)
            )
            for label in factor.labels
        )
        return LatticeMap(matroid.labels, factor.labels, matrix, 1)

    return ParallelSplit(
        matroid,
        first_factor,
        second_factor,
        first_point,
        second_point,
        point,
        projection(first_factor, first_point),
        projection(second_factor, second_point),
    )


def verify_split_support(
    matroid: Matroid, samples: int = MIN_SPLIT_SAMPLES, seed: int = 0
) -> SplitReport:
    """Check x in B(M) exactly when its split lies in B(M1) x B(M2), both ways.

    Collects `samples` on-support and `samples` off-support points on each side.
    """
    split = parallel_split_map(matroid)
    rng = random.Random(seed)
    failures: list[str] = []
    attempts = 100 * samples

    forward = {True: 0, False: 0}
    for attempt in range(attempts):
        if min(forward.values()) >= samples:
            break
        if attempt % 2:
            point = random_point(matroid.size, rng)
        else:
            point = random_support_point(matroid, rng)
        inside = membership(matroid, point)
        if forward[inside] >= samples:
            continue
        forward[inside] += 1
        first, second = split.apply(point)
        if inside != split.in_product_support(first, second):
            failures.append(f"forward {point}")
        if split.inverse_apply(first, second) != point:
            failures.append(f"round trip {point}")

    backward = {True: 0, False: 0}
    for attempt in range(attempts):
        if min(backward.values()) >= samples:
            break
        if attempt % 2:
            first = random_point(split.first_factor.size, rng)
            second = random_point(split.second_factor.size, rng)
        else:
            first = random_support_point(split.first_factor, rng)
            second = random_support_point(split.second_factor, rng)
        inside = split.in_product_support(first, second)
        if backward[inside] >= samples:
            continue
        backward[inside] += 1
        preimage = split.inverse_apply(first, second)
        if inside != membership(matroid, preimage):
            failures.append(f"backward {first} x {second}")
        if split.apply(preimage) != (first, second):
            failures.append(f"round trip {first} x {second}")

    counts_reached = min(*forward.values(), *backward.values()) >= samples
    if failures or not counts_reached:
        logger.warning(
            "Split support check: %s failures, counts forward %s backward %s",
            len(failures),
            forward,
            backward,
        )
    return SplitReport(
        not failures and counts_reached,
        forward[True],
        forward[False],
        backward[True],
        backward[False],
        tuple(failures),
    )


def parallel_connection_fan_isomorphism(
    matroid: Matroid, other: Matroid
) -> LatticeMap:
    """Split one parallel connection and glue the factors back along other points."""
    split = parallel_split_map(matroid)
    other_split = parallel_split_map(other)
    if (
        split.first_factor.to_dict() != other_split.first_factor.to_dict()
        or split.second_factor.to_dict() != other_split.second_factor.to_dict()
    ):
        different_factors_message = "Parallel connections have different factors"
        raise LatticeMapError(different_factors_message)
    columns = []
    for i in range(1, matroid.size):
        basis = QuotientVector.of(1 if j == i else 0 for j in range(matroid.size))
        first, second = split.apply(basis)
        columns.append(other_split.inverse_apply(first, second).reduced())
    quotient = [
        [column[j] for column in columns] for j in range(other.size - 1)
    ]
    return LatticeMap.from_quotient_matrix(matroid.labels, other.labels, quotient)


def _ray_images(
    lattice_map: LatticeMap, source: Fan, target: Fan
) -> tuple[list[int] | None, list[str]]:
    images: list[int] = []
    failures: list[str] = []
    for index, ray in enumerate(source.rays):
        image = target.ray_index(lattice_map.apply(ray.vector))
        if image is None:
            failures.append(
                f"ray {index} {ray.vector} maps to {lattice_map.apply(ray.vector)}, "
                "not a ray"
            )
        else:
            images.append(image)
    if failures:
        return None, failures
    if sorted(images) != list(range(len(target.rays))):
        return None, ["ray images are not a bijection"]
    return images, []


def _cone_failures(images: Sequence[int], source: Fan, target: Fan) -> list[str]:
    failures = []
    target_maximal = set(target.maximal)
    for cone in source.maximal_cones():
        image = frozenset(images[i] for i in cone)
        if image not in target_maximal:
            failures.append(f"cone {sorted(cone)} maps to {sorted(image)}, not a cone")
    if len(source.maximal) != len(target.maximal):
        failures.append("maximal cone counts differ")
    return failures


def verify_fan_isomorphism(
    lattice_map: LatticeMap, source: Fan, target: Fan
) -> IsomorphismReport:
    """Check the map and its inverse send rays to rays and cones to cones."""
    if not lattice_map.is_quotient_unimodular():
        not_unimodular_message = "Fan isomorphisms need a unimodular quotient matrix"
        raise LatticeMapError(not_unimodular_message)
    failures: list[str] = []
    images, ray_failures = _ray_images(lattice_map, source, target)
    failures += ray_failures
    if images is not None:
        failures += _cone_failures(images, source, target)
    inverse_images, inverse_failures = _ray_images(lattice_map.inverse(), target, source)
    failures += [f"inverse: {failure}" for failure in inverse_failures]
    if inverse_images is not None:
        failures += [
            f"inverse: {failure}"
            for failure in _cone_failures(inverse_images, target, source)
        ]
    if failures:
        logger.warning("Fan isomorphism check failed: %s", failures[0])
        return IsomorphismReport(False, None, tuple(failures))
    return IsomorphismReport(True, tuple(images or ()))


def ray_permutation(lattice_map: LatticeMap, fan: Fan) -> RayPermutation:
    report = verify_fan_isomorphism(lattice_map, fan, fan)
    if not report.ok or report.ray_images is None:
        not_automorphism_message = f"Map is not a fan automorphism: {report.failures[0]}"
        raise LatticeMapError(not_automorphism_message)
    return RayPermutation(report.ray_images)


def _permutation_group(generators: Sequence[RayPermutation]) -> PermutationGroup:
    return PermutationGroup([Permutation(list(g.images)) for g in generators])


def group_closure(
    generators: Sequence[RayPermutation], size: int = 0
) -> list[RayPermutation]:
    """All elements of the group generated by the permutations.

    With no generators the group is trivial; size gives its number of rays.
    """
    if not generators:
        return [RayPermutation.identity(size)]
    return [
        RayPermutation(tuple(element.array_form))
        for element in _permutation_group(generators).generate()
    ]


def group_closure_order(generators: Sequence[RayPermutation]) -> int:
    if not generators:
        return 1
    return int(_permutation_group(generators).order())


def rank_corank_transport(
    permutation: RayPermutation, fan: Fan, matroid: Matroid
) -> bool:
    """Whether rank 1 rays go to rays of rank 1 or corank 1."""
    top = matroid.rank()
    for index, ray in enumerate(fan.rays):
        if ray.rank != 1:
            continue
        image_rank = fan.rays[permutation(index)].rank
        if image_rank not in (1, top - 1):
            return False
    return True
