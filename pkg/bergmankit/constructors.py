"""Matroid constructors and the matching JSON loader.

Every constructor records a Provenance whose data is enough for `load_matroid` to
rebuild the same matroid.
"""

import itertools
import logging
from collections.abc import Callable, Iterable, Mapping, Sequence
from typing import Any

import networkx as nx
from sympy import isprime

from bergmankit import linalg
from bergmankit.matroid import (
    GroundSet,
    LoopError,
    Matroid,
    Provenance,
    bits,
    contract,
    delete,
    direct_sum,
    relabel,
    restrict,
    simplify,
    truncate,
)

logger = logging.getLogger(__name__)

GroupTable = Sequence[Sequence[int]]


class ConstructorError(ValueError):
    """Exception raised when constructor input does not describe a matroid."""


def _labels(labels: Sequence[str] | None, size: int) -> tuple[str, ...]:
    if labels is None:
        return tuple(str(i) for i in range(size))
    if len(labels) != size:
        label_count_message = f"Expected {size} labels, got {len(labels)}"
        raise ConstructorError(label_count_message)
    return tuple(labels)


def uniform(rank: int, size: int, labels: Sequence[str] | None = None) -> Matroid:
    if size < 1 or not 0 <= rank <= size:
        uniform_message = (
            f"Uniform matroid needs 0 <= r <= n and n >= 1, got r={rank}, n={size}"
        )
        raise ConstructorError(uniform_message)
    return Matroid(
        GroundSet(_labels(labels, size)),
        lambda mask: min(mask.bit_count(), rank),
        Provenance("uniform", {"rank": rank, "size": size}),
    )


def graphic(
    vertex_count: int, edges: Iterable[tuple[int, int]], *, simple: bool = False
) -> Matroid:
    """The cycle matroid of a graph on vertices 1..vertex_count.

    Edge {a, b} is labelled "ab" with a < b; repeated edges get a "_k" suffix unless
    `simple` is set, in which case they are rejected.
    """
    normalized: list[tuple[int, int]] = []
    labels: list[str] = []
    for first, second in edges:
        if first == second:
            self_loop_message = f"Self-loop edge ({first}, {second}) is not allowed"
            raise ConstructorError(self_loop_message)
        if not (1 <= first <= vertex_count and 1 <= second <= vertex_count):
            vertex_range_message = (
                f"Edge ({first}, {second}) leaves the vertex range 1..{vertex_count}"
            )
            raise ConstructorError(vertex_range_message)
        edge = (min(first, second), max(first, second))
        label = f"{edge[0]}{edge[1]}"
        if edge in normalized:
            if simple:
                duplicate_edge_message = f"Duplicate edge {edge} in a simple graph"
                raise ConstructorError(duplicate_edge_message)
            label = f"{label}_{normalized.count(edge)}"
        normalized.append(edge)
        labels.append(label)

    def rank_function(mask: int) -> int:
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(1, vertex_count + 1))
        graph.add_edges_from(normalized[i] for i in bits(mask))
        return vertex_count - nx.number_connected_components(graph)

    return Matroid(
        GroundSet(tuple(labels)),
        rank_function,
        Provenance(
            "graphic",
            {
                "vertex_count": vertex_count,
                "edges": [list(edge) for edge in normalized],
                "simple": simple,
            },
        ),
    )


def complete_graph(vertex_count: int) -> Matroid:
    return graphic(
        vertex_count,
        itertools.combinations(range(1, vertex_count + 1), 2),
        simple=True,
    )


def linear(
    prime: int, columns: Sequence[Sequence[int]], labels: Sequence[str] | None = None
) -> Matroid:
    if not isprime(prime):
        prime_message = f"Modulus {prime} is not prime"
        raise ConstructorError(prime_message)
    if not columns:
        no_columns_message = "Linear matroid needs at least one column"
        raise ConstructorError(no_columns_message)
    height = len(columns[0])
    reduced: list[list[int]] = []
    for position, column in enumerate(columns):
        if len(column) != height:
            column_length_message = (
                f"Column {position} has length {len(column)}, expected {height}"
            )
            raise ConstructorError(column_length_message)
        entries = [entry % prime for entry in column]
        if not any(entries):
            zero_column_message = f"Column {position} is zero over GF({prime})"
            raise ConstructorError(zero_column_message)
        reduced.append(entries)

    def rank_function(mask: int) -> int:
        return linalg.rank_mod_p([reduced[i] for i in bits(mask)], prime)

    return Matroid(
        GroundSet(_labels(labels, len(reduced))),
        rank_function,
        Provenance("linear", {"prime": prime, "columns": reduced}),
    )


def projective_geometry(dimension: int, prime: int) -> Matroid:
    """PG(dimension, prime): one point per line through the origin of GF(p)^(d+1)."""
    if dimension < 2:
        dimension_message = f"Projective geometry needs dimension >= 2, got {dimension}"
        raise ConstructorError(dimension_message)
    if not isprime(prime):
        prime_message = f"Modulus {prime} is not prime"
        raise ConstructorError(prime_message)
    representatives = [
        vector
        for vector in itertools.product(range(prime), repeat=dimension + 1)
        if any(vector) and next(entry for entry in vector if entry) == 1
    ]
    separator = "," if prime > 10 else ""
    labels = [
        separator.join(str(entry) for entry in vector) for vector in representatives
    ]
    matroid = linear(prime, [list(vector) for vector in representatives], labels)
    matroid.provenance = Provenance(
        "projective_geometry", {"dimension": dimension, "prime": prime}
    )
    logger.debug("Built PG(%s, %s) on %s points", dimension, prime, len(labels))
    return matroid


def cyclic_group_table(order: int) -> list[list[int]]:
    return [[(a + b) % order for b in range(order)] for a in range(order)]


def _group_identity(table: GroupTable) -> int:
    order = len(table)
    if order == 0 or any(len(row) != order for row in table):
        shape_message = "Group table must be a non-empty square table"
        raise ConstructorError(shape_message)
    if any(not 0 <= entry < order for row in table for entry in row):
        range_message = f"Group table entries must lie in 0..{order - 1}"
        raise ConstructorError(range_message)
    identities = [
        e
        for e in range(order)
        if all(table[e][a] == a and table[a][e] == a for a in range(order))
    ]
    if not identities:
        identity_message = "Group table has no identity element"
        raise ConstructorError(identity_message)
    identity = identities[0]
    for a, b, c in itertools.product(range(order), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            associativity_message = f"Group table is not associative at ({a}, {b}, {c})"
            raise ConstructorError(associativity_message)
    for a in range(order):
        if identity not in table[a]:
            inverse_message = f"Group element {a} has no inverse"
            raise ConstructorError(inverse_message)
    return identity


def _group_names(table: GroupTable, identity: int) -> list[str]:
    names: list[str] = []
    counter = 0
    for element in range(len(table)):
        if element == identity:
            names.append("e")
        else:
            counter += 1
            names.append(f"g{counter}")
    return names


def dowling(
    dimension: int, table: GroupTable, names: Sequence[str] | None = None
) -> Matroid:
    """The Dowling geometry Q_d(G) of a finite group given by its multiplication table.

    Elements are the joints b1..bd and, for each pair i < j and each group element g,
    the element "<name of g>_<i><j>". The rank of a set is d minus the number of
    balanced components of its gain graph, where a joint makes its component
    unbalanced.
    """
    if dimension < 3:
        dimension_message = f"Dowling geometry needs d >= 3, got {dimension}"
        raise ConstructorError(dimension_message)
    identity = _group_identity(table)
    group_names = list(names) if names is not None else _group_names(table, identity)
    if len(group_names) != len(table) or len(set(group_names)) != len(group_names):
        names_message = "Group element names must be distinct, one per element"
        raise ConstructorError(names_message)

    labels = [f"b{i}" for i in range(1, dimension + 1)]
    joints = list(range(1, dimension + 1))
    gains: list[tuple[int, int, int]] = []
    for i, j in itertools.combinations(range(1, dimension + 1), 2):
        for element, name in enumerate(group_names):
            labels.append(f"{name}_{i}{j}")
            gains.append((i, j, element))

    def rank_function(mask: int) -> int:
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(1, dimension + 1))
        unbalanced: set[int] = set()
        for index in bits(mask):
            if index < dimension:
                unbalanced.add(joints[index])
            else:
                i, j, element = gains[index - dimension]
                graph.add_edge(i, j, gain=element)
        balanced = 0
        for component in nx.connected_components(graph):
            if component & unbalanced:
                continue
            if _is_balanced(graph.subgraph(component), table, identity):
                balanced += 1
        return dimension - balanced

    return Matroid(
        GroundSet(tuple(labels)),
        rank_function,
        Provenance(
            "dowling",
            {
                "dimension": dimension,
                "table": [list(row) for row in table],
                "names": group_names,
            },
        ),
    )


def _is_balanced(component: nx.MultiGraph, table: GroupTable, identity: int) -> bool:
    root = min(component.nodes)
    potential = {root: identity}
    for parent, child in nx.bfs_edges(component, root):
        gain = next(iter(component.get_edge_data(parent, child).values()))["gain"]
        if parent < child:
            potential[child] = table[potential[parent]][gain]
        else:
            potential[child] = _left_divide(table, gain, potential[parent])
    return all(
        potential[j] == table[potential[i]][data["gain"]]
        for a, b, data in component.edges(data=True)
        for i, j in [(min(a, b), max(a, b))]
    )


def _left_divide(table: GroupTable, gain: int, product: int) -> int:
    """The unique x with x * gain == product."""
    return next(x for x in range(len(table)) if table[x][gain] == product)


def _resolve(ground: GroundSet, element: str | int) -> str:
    if isinstance(element, int):
        return ground.labels[element]
    ground.mask([element])
    return element


def _ground_of(labels: int | Sequence[str]) -> GroundSet:
    if isinstance(labels, int):
        return GroundSet(tuple(str(i) for i in range(labels)))
    return GroundSet(tuple(labels))


def from_bases(
    labels: int | Sequence[str], bases: Iterable[Iterable[str | int]]
) -> Matroid:
    ground = _ground_of(labels)
    masks = sorted(
        {ground.mask(_resolve(ground, e) for e in basis) for basis in bases}
    )
    if not masks:
        no_bases_message = "A matroid needs at least one basis"
        raise ConstructorError(no_bases_message)
    if len({mask.bit_count() for mask in masks}) != 1:
        cardinality_message = "Bases must all have the same size"
        raise ConstructorError(cardinality_message)
    basis_set = set(masks)
    for first, second in itertools.permutations(masks, 2):
        for out in bits(first & ~second):
            remaining = first & ~(1 << out)
            if not any(
                remaining | (1 << into) in basis_set for into in bits(second & ~first)
            ):
                exchange_message = (
                    "Basis exchange fails for "
                    f"{sorted(ground.labels_of(first))} and "
                    f"{sorted(ground.labels_of(second))} "
                    f"removing '{ground.labels[out]}'"
                )
                raise ConstructorError(exchange_message)
    return Matroid(
        ground,
        lambda mask: max((mask & basis).bit_count() for basis in masks),
        Provenance(
            "bases", {"bases": [list(ground.ordered(mask)) for mask in masks]}
        ),
    )


def _independent_rank(circuits: Sequence[int]) -> Callable[[int], int]:
    def rank_function(mask: int) -> int:
        independent = 0
        for index in bits(mask):
            grown = independent | (1 << index)
            if not any(circuit & grown == circuit for circuit in circuits):
                independent = grown
        return independent.bit_count()

    return rank_function


def from_circuits(
    labels: int | Sequence[str], circuits: Iterable[Iterable[str | int]]
) -> Matroid:
    ground = _ground_of(labels)
    masks = sorted(
        {ground.mask(_resolve(ground, e) for e in circuit) for circuit in circuits}
    )
    if 0 in masks:
        empty_circuit_message = "The empty set cannot be a circuit"
        raise ConstructorError(empty_circuit_message)
    circuit_set = set(masks)
    for first, second in itertools.permutations(masks, 2):
        if first & second == first:
            antichain_message = (
                f"Circuit {sorted(ground.labels_of(first))} lies inside "
                f"{sorted(ground.labels_of(second))}"
            )
            raise ConstructorError(antichain_message)
        for shared in bits(first & second):
            union = (first | second) & ~(1 << shared)
            if not any(circuit & union == circuit for circuit in circuit_set):
                elimination_message = (
                    "Circuit elimination fails for "
                    f"{sorted(ground.labels_of(first))} and "
                    f"{sorted(ground.labels_of(second))} at '{ground.labels[shared]}'"
                )
                raise ConstructorError(elimination_message)
    return Matroid(
        ground,
        _independent_rank(masks),
        Provenance(
            "circuits", {"circuits": [list(ground.ordered(mask)) for mask in masks]}
        ),
    )


def parallel_connection(
    first: Matroid,
    second: Matroid,
    first_point: str,
    second_point: str,
    point: str | None = None,
) -> Matroid:
    """Glue two matroids along first_point ~ second_point.

    The glued element is called `point` (default: first_point). Circuits are those of
    both factors plus (C1 ∪ C2) minus the point for circuits C1, C2 through it. When
    the point is a coloop of a factor the result is the direct sum of that factor
    with the point deleted and the other factor.
    """
    first.ground.mask([first_point])
    second.ground.mask([second_point])
    for matroid, label in ((first, first_point), (second, second_point)):
        if matroid.rank([label]) == 0:
            loop_point_message = f"Gluing point '{label}' is a loop"
            raise LoopError(loop_point_message)
    glued = point if point is not None else first_point
    left = [glued if label == first_point else label for label in first.labels]
    right = [label for label in second.labels if label != second_point]
    if overlap := (set(left) & set(right)) | ({glued} & set(right)):
        overlap_message = f"Parallel connection labels collide: {sorted(overlap)}"
        raise ConstructorError(overlap_message)
    labels = [*left, *right]

    def rename(circuit: frozenset[str], gluing: str) -> frozenset[str]:
        return frozenset(glued if label == gluing else label for label in circuit)

    first_circuits = [rename(c, first_point) for c in first.circuits()]
    second_circuits = [rename(c, second_point) for c in second.circuits()]
    glued_circuits = [
        (c1 | c2) - {glued}
        for c1 in first_circuits
        if glued in c1
        for c2 in second_circuits
        if glued in c2
    ]
    matroid = from_circuits(labels, [*first_circuits, *second_circuits, *glued_circuits])
    matroid.provenance = Provenance(
        "parallel_connection",
        {
            "first_point": first_point,
            "second_point": second_point,
            "point": glued,
            "parent_names": ("left", "right"),
        },
        (first, second),
    )
    logger.debug(
        "Built parallel connection along '%s' with %s circuits",
        glued,
        len(matroid.circuit_masks()),
    )
    return matroid


def load_matroid(document: Mapping[str, Any]) -> Matroid:  # noqa: C901, PLR0911
    """Rebuild a matroid from the dictionary produced by `Matroid.to_dict`."""
    try:
        kind = document["kind"]
        labels = list(document["labels"])
        data = document.get("data", {})
        match kind:
            case "uniform":
                return uniform(data["rank"], data["size"], labels)
            case "graphic":
                return graphic(
                    data["vertex_count"],
                    [tuple(edge) for edge in data["edges"]],
                    simple=data.get("simple", False),
                )
            case "linear":
                return linear(data["prime"], data["columns"], labels)
            case "projective_geometry":
                return projective_geometry(data["dimension"], data["prime"])
            case "dowling":
                return dowling(data["dimension"], data["table"], data.get("names"))
            case "bases":
                return from_bases(labels, data["bases"])
            case "circuits":
                return from_circuits(labels, data["circuits"])
            case "parallel_connection":
                return parallel_connection(
                    load_matroid(data["left"]),
                    load_matroid(data["right"]),
                    data["first_point"],
                    data["second_point"],
                    data.get("point"),
                )
            case "direct_sum":
                return direct_sum(load_matroid(data["left"]), load_matroid(data["right"]))
            case "restrict":
                return restrict(load_matroid(data["parent"]), data["elements"])
            case "delete":
                return delete(load_matroid(data["parent"]), data["elements"])
            case "contract":
                return contract(load_matroid(data["parent"]), data["elements"])
            case "simplify":
                return simplify(load_matroid(data["parent"]))[0]
            case "truncate":
                return truncate(load_matroid(data["parent"]), data["rank"])
            case "relabel":
                return relabel(load_matroid(data["parent"]), labels)
    except (KeyError, TypeError) as error:
        malformed_message = f"Malformed matroid document: missing or invalid {error}"
        raise ConstructorError(malformed_message) from None
    unknown_kind_message = f"Unknown matroid kind '{kind}'"
    raise ConstructorError(unknown_kind_message)
