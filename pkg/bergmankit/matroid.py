"""Matroids given by a memoized rank oracle, with flats, circuits and minors.

Subsets are handled internally as integer bitmasks over the ground-set indices; the
public surface speaks in string labels.
"""

import itertools
import logging
import random
import threading
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, TypeVar

import networkx as nx

logger = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 12
AXIOM_SAMPLES = 64
AXIOM_EXHAUSTIVE_LIMIT = 6

T = TypeVar("T")


class MatroidAxiomError(ValueError):
    """Exception raised when rank, basis or circuit axioms are violated."""


class UnknownLabelError(KeyError):
    """Exception raised when a label is not part of the ground set."""


class LoopError(ValueError):
    """Exception raised when an operation requires a loop-free matroid."""


def bits(mask: int) -> Iterator[int]:
    index = 0
    while mask:
        if mask & 1:
            yield index
        mask >>= 1
        index += 1


def mask_key(mask: int) -> tuple[int, ...]:
    return tuple(bits(mask))


@dataclass(frozen=True)
class GroundSet:
    labels: tuple[str, ...]
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.labels)) != len(self.labels):
            duplicate_labels_message = f"Ground set labels repeat: {self.labels}"
            raise ValueError(duplicate_labels_message)
        object.__setattr__(
            self, "index", {label: i for i, label in enumerate(self.labels)}
        )

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.labels)) - 1

    def mask(self, labels: Iterable[str]) -> int:
        result = 0
        for label in labels:
            try:
                result |= 1 << self.index[label]
            except KeyError:
                unknown_label_message = f"Label '{label}' is not in the ground set"
                raise UnknownLabelError(unknown_label_message) from None
        return result

    def labels_of(self, mask: int) -> frozenset[str]:
        return frozenset(self.labels[i] for i in bits(mask))

    def ordered(self, mask: int) -> tuple[str, ...]:
        return tuple(self.labels[i] for i in bits(mask))


@dataclass(frozen=True)
class Flat:
    elements: frozenset[str]
    rank: int
    mask: int = field(compare=False)

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class FlatsLattice:
    flats_by_rank: tuple[tuple[Flat, ...], ...]
    covers: Mapping[int, tuple[int, ...]]

    @property
    def bottom(self) -> Flat:
        return self.flats_by_rank[0][0]

    @property
    def top(self) -> Flat:
        return self.flats_by_rank[-1][0]

    def flats(self) -> list[Flat]:
        return [flat for level in self.flats_by_rank for flat in level]

    def counts(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.flats_by_rank)


@dataclass(frozen=True)
class Provenance:
    kind: str
    data: Mapping[str, Any] = field(default_factory=dict)
    parents: tuple["Matroid", ...] = ()


class Matroid:
    """A matroid on string labels, defined by a rank function on bitmasks.

    The rank function is memoized behind a lock, so instances can be shared across
    threads. Instances are never mutated after construction apart from that cache.
    """

    def __init__(
        self,
        ground: GroundSet,
        rank_function: Callable[[int], int],
        provenance: Provenance,
        *,
        check_axioms: bool = True,
    ) -> None:
        self.ground = ground
        self.provenance = provenance
        self._rank_function = rank_function
        self._lock = threading.RLock()
        self._ranks: dict[int, int] = {}
        self._memo: dict[Hashable, Any] = {}
        if check_axioms:
            self._spot_check_axioms()

    def __repr__(self) -> str:
        return (
            f"Matroid(kind={self.provenance.kind!r}, rank={self.rank()}, "
            f"size={len(self.ground)})"
        )

    @property
    def labels(self) -> tuple[str, ...]:
        return self.ground.labels

    @property
    def size(self) -> int:
        return len(self.ground)

    def memoize(self, key: Hashable, factory: Callable[[], T]) -> T:
        with self._lock:
            if key in self._memo:
                return self._memo[key]  # type: ignore[no-any-return]
        value = factory()
        with self._lock:
            self._memo.setdefault(key, value)
            return self._memo[key]  # type: ignore[no-any-return]

    def rank_mask(self, mask: int) -> int:
        with self._lock:
            cached = self._ranks.get(mask)
        if cached is not None:
            return cached
        value = self._rank_function(mask)
        with self._lock:
            self._ranks[mask] = value
        return value

    def rank(self, labels: Iterable[str] | None = None) -> int:
        if labels is None:
            return self.rank_mask(self.ground.full_mask)
        return self.rank_mask(self.ground.mask(labels))

    def corank(self, labels: Iterable[str]) -> int:
        return self.rank() - self.rank(labels)

    def _spot_check_axioms(self) -> None:
        size = len(self.ground)
        if self.rank_mask(0) != 0:
            empty_rank_message = "Rank of the empty set must be 0"
            raise MatroidAxiomError(empty_rank_message)
        if size == 0:
            return
        full = self.ground.full_mask
        if size <= AXIOM_EXHAUSTIVE_LIMIT:
            subsets = range(full + 1)
            for first, second in itertools.combinations_with_replacement(subsets, 2):
                self._check_submodular(first, second)
            for first in subsets:
                for i in range(size):
                    self._check_unit_increase(first, 1 << i)
            return
        rng = random.Random(size)
        for _ in range(AXIOM_SAMPLES):
            first = rng.randint(0, full)
            self._check_submodular(first, rng.randint(0, full))
            self._check_unit_increase(first, 1 << rng.randrange(size))

    def _check_submodular(self, first: int, second: int) -> None:
        union_rank = self.rank_mask(first | second)
        meet_rank = self.rank_mask(first & second)
        if union_rank + meet_rank > self.rank_mask(first) + self.rank_mask(second):
            submodularity_message = (
                "Rank function is not submodular on "
                f"{sorted(self.ground.labels_of(first))} and "
                f"{sorted(self.ground.labels_of(second))}"
            )
            raise MatroidAxiomError(submodularity_message)

    def _check_unit_increase(self, first: int, element: int) -> None:
        grown = self.rank_mask(first | element)
        base = self.rank_mask(first)
        if not base <= grown <= base + 1:
            unit_increase_message = (
                "Rank function is not unit-increasing at "
                f"{sorted(self.ground.labels_of(first))} + "
                f"{self.ground.ordered(element)[0]}"
            )
            raise MatroidAxiomError(unit_increase_message)

    def closure_mask(self, mask: int) -> int:
        target = self.rank_mask(mask)
        result = mask
        for i in range(len(self.ground)):
            bit = 1 << i
            if not mask & bit and self.rank_mask(mask | bit) == target:
                result |= bit
        return result

    def closure(self, labels: Iterable[str]) -> Flat:
        mask = self.closure_mask(self.ground.mask(labels))
        return self.flat_of_mask(mask)

    def flat_of_mask(self, mask: int) -> Flat:
        return Flat(self.ground.labels_of(mask), self.rank_mask(mask), mask)

    def is_flat(self, labels: Iterable[str]) -> bool:
        mask = self.ground.mask(labels)
        return self.closure_mask(mask) == mask

    def flats_lattice(self) -> FlatsLattice:
        return self.memoize("flats_lattice", self._build_flats_lattice)

    def _build_flats_lattice(self) -> FlatsLattice:
        levels: list[list[int]] = [[self.closure_mask(0)]]
        covers: dict[int, tuple[int, ...]] = {}
        for rank in range(self.rank()):
            upper: set[int] = set()
            for flat in levels[rank]:
                covering: set[int] = set()
                for i in range(len(self.ground)):
                    if flat & (1 << i):
                        continue
                    covering.add(self.closure_mask(flat | (1 << i)))
                covers[flat] = tuple(sorted(covering, key=mask_key))
                upper |= covering
            levels.append(sorted(upper, key=mask_key))
        covers[levels[-1][0]] = ()
        logger.debug(
            "Built flats lattice with counts %s", [len(level) for level in levels]
        )
        return FlatsLattice(
            tuple(tuple(self.flat_of_mask(mask) for mask in level) for level in levels),
            covers,
        )

    def flats_of_rank(self, rank: int) -> list[Flat]:
        levels = self.flats_lattice().flats_by_rank
        if not 0 <= rank < len(levels):
            return []
        return list(levels[rank])

    def flats(self) -> list[Flat]:
        return self.flats_lattice().flats()

    def proper_flats(self) -> list[Flat]:
        """Flats other than the closure of the empty set and the whole ground set."""
        levels = self.flats_lattice().flats_by_rank
        return [flat for level in levels[1:-1] for flat in level]

    def circuit_masks(self) -> tuple[int, ...]:
        return self.memoize("circuits", self._enumerate_circuits)

    def _enumerate_circuits(self) -> tuple[int, ...]:
        found: list[int] = []
        size = len(self.ground)
        for subset_size in range(1, min(size, self.rank() + 1) + 1):
            for combination in itertools.combinations(range(size), subset_size):
                mask = sum(1 << i for i in combination)
                if any(circuit & mask == circuit for circuit in found):
                    continue
                if self.rank_mask(mask) < subset_size:
                    found.append(mask)
        return tuple(found)

    def circuits(self) -> list[frozenset[str]]:
        return [self.ground.labels_of(mask) for mask in self.circuit_masks()]

    def loops(self) -> frozenset[str]:
        return frozenset(
            label for i, label in enumerate(self.labels) if self.rank_mask(1 << i) == 0
        )

    def parallel_classes(self) -> list[frozenset[str]]:
        classes: dict[int, int] = {}
        loop_mask = self.closure_mask(0)
        for i in range(len(self.ground)):
            if loop_mask & (1 << i):
                continue
            parallel = self.closure_mask(1 << i) & ~loop_mask
            classes.setdefault(parallel, parallel)
        return [
            self.ground.labels_of(mask) for mask in sorted(classes, key=mask_key)
        ]

    def is_simple(self) -> bool:
        return not self.loops() and all(len(c) == 1 for c in self.parallel_classes())

    def basis_mask(self) -> int:
        basis = 0
        current = 0
        for i in range(len(self.ground)):
            grown = self.rank_mask(basis | (1 << i))
            if grown > current:
                basis |= 1 << i
                current = grown
        return basis

    def bases(self) -> list[frozenset[str]]:
        rank = self.rank()
        return [
            frozenset(self.labels[i] for i in combination)
            for combination in itertools.combinations(range(len(self.ground)), rank)
            if self.rank_mask(sum(1 << i for i in combination)) == rank
        ]

    def is_basis(self, labels: Iterable[str]) -> bool:
        chosen = list(labels)
        return len(set(chosen)) == len(chosen) == self.rank() == self.rank(chosen)

    def connected_components(self) -> list[frozenset[str]]:
        return [self.ground.labels_of(mask) for mask in self.component_masks()]

    def component_masks(self) -> tuple[int, ...]:
        return self.memoize("components", self._fundamental_components)

    def _fundamental_components(self) -> tuple[int, ...]:
        """Components from the fundamental circuits of one basis.

        Two elements share a component exactly when they are linked through
        fundamental circuits of a fixed basis.
        """
        basis = self.basis_mask()
        rank = self.rank_mask(basis)
        graph = nx.Graph()
        graph.add_nodes_from(range(len(self.ground)))
        for element in range(len(self.ground)):
            bit = 1 << element
            if basis & bit or self.rank_mask(bit) == 0:
                continue
            for basis_element in bits(basis):
                exchanged = (basis & ~(1 << basis_element)) | bit
                if self.rank_mask(exchanged) == rank:
                    graph.add_edge(element, basis_element)
        blocks = sorted(
            (
                sum(1 << i for i in component)
                for component in nx.connected_components(graph)
            ),
            key=mask_key,
        )
        if sum(self.rank_mask(block) for block in blocks) != self.rank():
            inconsistent_components_message = (
                "Component ranks do not add up to the matroid rank"
            )
            raise MatroidAxiomError(inconsistent_components_message)
        return tuple(blocks)

    def circuit_component_masks(self) -> tuple[int, ...]:
        """Components from the definition: elements sharing a circuit are related."""
        graph = nx.Graph()
        graph.add_nodes_from(range(len(self.ground)))
        for circuit in self.circuit_masks():
            members = list(bits(circuit))
            graph.add_edges_from(itertools.pairwise(members))
        return tuple(
            sorted(
                (sum(1 << i for i in c) for c in nx.connected_components(graph)),
                key=mask_key,
            )
        )

    def is_connected(self) -> bool:
        return len(self.component_masks()) <= 1

    def is_totally_disconnected(self) -> bool:
        return all(self.rank_mask(block) <= 1 for block in self.component_masks())

    def require_loop_free(self) -> None:
        if loops := self.loops():
            loops_message = (
                f"Matroid has loops {sorted(loops)}; a loop-free one is needed"
            )
            raise LoopError(loops_message)

    def to_dict(self) -> dict[str, Any]:
        data = dict(self.provenance.data)
        for name, parent in zip(
            data.pop("parent_names", ()), self.provenance.parents, strict=True
        ):
            data[name] = parent.to_dict()
        return {"labels": list(self.labels), "kind": self.provenance.kind, "data": data}


def _lifted(mask: int, parent_bits: Sequence[int]) -> int:
    result = 0
    for i in bits(mask):
        result |= parent_bits[i]
    return result


def _derived(
    parent: "Matroid",
    kept: int,
    rank_function: Callable[[int], int],
    kind: str,
    data: Mapping[str, Any],
) -> Matroid:
    labels = parent.ground.ordered(kept)
    return Matroid(
        GroundSet(labels),
        rank_function,
        Provenance(kind, {"parent_names": ("parent",), **data}, (parent,)),
        check_axioms=False,
    )


def restrict(matroid: Matroid, labels: Iterable[str]) -> Matroid:
    kept = matroid.ground.mask(labels)
    parent_bits = [1 << i for i in bits(kept)]
    return _derived(
        matroid,
        kept,
        lambda mask: matroid.rank_mask(_lifted(mask, parent_bits)),
        "restrict",
        {"elements": list(matroid.ground.ordered(kept))},
    )


def delete(matroid: Matroid, labels: Iterable[str]) -> Matroid:
    removed = matroid.ground.mask(labels)
    kept = matroid.ground.full_mask & ~removed
    parent_bits = [1 << i for i in bits(kept)]
    return _derived(
        matroid,
        kept,
        lambda mask: matroid.rank_mask(_lifted(mask, parent_bits)),
        "delete",
        {"elements": list(matroid.ground.ordered(removed))},
    )


def contract(matroid: Matroid, labels: Iterable[str]) -> Matroid:
    contracted = matroid.ground.mask(labels)
    kept = matroid.ground.full_mask & ~contracted
    parent_bits = [1 << i for i in bits(kept)]
    contracted_rank = matroid.rank_mask(contracted)
    return _derived(
        matroid,
        kept,
        lambda mask: matroid.rank_mask(_lifted(mask, parent_bits) | contracted)
        - contracted_rank,
        "contract",
        {"elements": list(matroid.ground.ordered(contracted))},
    )


def minor(matroid: Matroid, lower: Iterable[str], upper: Iterable[str]) -> Matroid:
    """The minor M|upper/lower for sets lower inside upper."""
    lower_labels = list(lower)
    return contract(restrict(matroid, upper), lower_labels)


def truncate(matroid: Matroid, rank: int) -> Matroid:
    if not 1 <= rank <= matroid.rank():
        truncation_message = (
            f"Truncation rank must lie between 1 and {matroid.rank()}, got {rank}"
        )
        raise ValueError(truncation_message)
    return _derived(
        matroid,
        matroid.ground.full_mask,
        lambda mask: min(matroid.rank_mask(mask), rank),
        "truncate",
        {"rank": rank},
    )


def relabel(matroid: Matroid, labels: Sequence[str]) -> Matroid:
    if len(labels) != matroid.size:
        relabel_message = (
            f"Relabelling needs {matroid.size} labels, got {len(labels)}"
        )
        raise ValueError(relabel_message)
    return Matroid(
        GroundSet(tuple(labels)),
        matroid.rank_mask,
        Provenance("relabel", {"parent_names": ("parent",)}, (matroid,)),
        check_axioms=False,
    )


def direct_sum(first: Matroid, second: Matroid) -> Matroid:
    if overlap := set(first.labels) & set(second.labels):
        overlap_message = f"Direct sum needs disjoint labels, shared: {sorted(overlap)}"
        raise ValueError(overlap_message)
    shift = first.size
    low = first.ground.full_mask

    def rank_function(mask: int) -> int:
        return first.rank_mask(mask & low) + second.rank_mask(mask >> shift)

    return Matroid(
        GroundSet(first.labels + second.labels),
        rank_function,
        Provenance(
            "direct_sum", {"parent_names": ("left", "right")}, (first, second)
        ),
        check_axioms=False,
    )


def simplify(matroid: Matroid) -> tuple[Matroid, dict[str, str]]:
    """Remove loops and keep the first element of every parallel class.

    Returns the simple matroid and the map sending every non-loop label to the
    label representing its parallel class.
    """
    quotient: dict[str, str] = {}
    representatives: list[str] = []
    for parallel_class in matroid.parallel_classes():
        ordered = [label for label in matroid.labels if label in parallel_class]
        representatives.append(ordered[0])
        for label in ordered:
            quotient[label] = ordered[0]
    kept = matroid.ground.mask(representatives)
    parent_bits = [1 << i for i in bits(kept)]
    simple = _derived(
        matroid,
        kept,
        lambda mask: matroid.rank_mask(_lifted(mask, parent_bits)),
        "simplify",
        {},
    )
    return simple, quotient


def is_nontrivial_parallel_connection_along(matroid: Matroid, label: str) -> bool:
    matroid.ground.mask([label])
    if not matroid.is_simple():
        not_simple_message = "Parallel-connection test needs a simple matroid"
        raise ValueError(not_simple_message)
    return not contract(matroid, [label]).is_connected()


def is_nontrivial_parallel_connection(matroid: Matroid) -> bool:
    return any(
        is_nontrivial_parallel_connection_along(matroid, label)
        for label in matroid.labels
    )


def rank_preservation_witness(
    bijection: Mapping[str, str], source: Matroid, target: Matroid
) -> frozenset[str] | None:
    """A subset whose rank changes under the bijection, or None if there is none.

    All subsets are compared for ground sets of at most EXHAUSTIVE_LIMIT elements,
    otherwise flats and their images.
    """
    images = [bijection[label] for label in source.labels]
    target_bits = [target.ground.mask([image]) for image in images]
    if source.size <= EXHAUSTIVE_LIMIT:
        candidates: Iterable[int] = range(source.ground.full_mask + 1)
    else:
        candidates = [flat.mask for flat in source.flats()]
    for mask in candidates:
        if source.rank_mask(mask) != target.rank_mask(_lifted(mask, target_bits)):
            return source.ground.labels_of(mask)
    if source.size > EXHAUSTIVE_LIMIT:
        inverse = {image: label for label, image in bijection.items()}
        for flat in target.flats():
            preimage = source.ground.mask(inverse[label] for label in flat.elements)
            if source.closure_mask(preimage) != preimage:
                return source.ground.labels_of(preimage)
    return None


def matroid_isomorphisms(first: Matroid, second: Matroid) -> Iterator[dict[str, str]]:
    """All label bijections that are matroid isomorphisms, by backtracking.

    Partial assignments are pruned as soon as a circuit whose elements are all
    assigned fails to land on a circuit.
    """
    if first.size != second.size or first.rank() != second.rank():
        return
    first_circuits = first.circuit_masks()
    second_circuits = set(second.circuit_masks())
    if sorted(c.bit_count() for c in first_circuits) != sorted(
        c.bit_count() for c in second_circuits
    ):
        return
    closing: dict[int, list[int]] = {}
    for circuit in first_circuits:
        closing.setdefault(circuit.bit_length() - 1, []).append(circuit)
    size = first.size
    assignment = [0] * size
    used = [False] * size

    def extend(position: int) -> Iterator[list[int]]:
        if position == size:
            yield assignment
            return
        for candidate in range(size):
            if used[candidate]:
                continue
            if first.rank_mask(1 << position) != second.rank_mask(1 << candidate):
                continue
            assignment[position] = candidate
            if all(
                _lifted(circuit, [1 << t for t in assignment]) in second_circuits
                for circuit in closing.get(position, ())
            ):
                used[candidate] = True
                yield from extend(position + 1)
                used[candidate] = False

    for complete in extend(0):
        yield {
            first.labels[i]: second.labels[image] for i, image in enumerate(complete)
        }


def matroid_automorphisms(matroid: Matroid) -> list[dict[str, str]]:
    return list(matroid_isomorphisms(matroid, matroid))


def is_isomorphic(first: Matroid, second: Matroid) -> bool:
    return next(matroid_isomorphisms(first, second), None) is not None
