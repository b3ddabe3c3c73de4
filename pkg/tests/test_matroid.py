import pytest

from bergmankit import constructors
from bergmankit.matroid import (
    GroundSet,
    LoopError,
    Matroid,
    MatroidAxiomError,
    Provenance,
    UnknownLabelError,
    contract,
    delete,
    direct_sum,
    is_isomorphic,
    is_nontrivial_parallel_connection,
    matroid_automorphisms,
    matroid_isomorphisms,
    minor,
    rank_preservation_witness,
    relabel,
    restrict,
    simplify,
    truncate,
)


def test_k4_rank_and_flat_counts(k4):
    assert k4.rank() == 3
    assert k4.flats_lattice().counts() == (1, 6, 7, 1)


def test_fano_flat_counts_and_circuits(fano):
    assert fano.size == 7
    assert fano.rank() == 3
    assert fano.flats_lattice().counts() == (1, 7, 7, 1)
    sizes = sorted(len(circuit) for circuit in fano.circuits())
    assert sizes == [3] * 7 + [4] * 7


def test_fano_lines_have_three_points(fano):
    assert all(len(flat) == 3 for flat in fano.flats_of_rank(2))


def test_closure_of_two_triangle_edges_is_the_triangle(k4):
    assert k4.closure(["12", "13"]).elements == frozenset({"12", "13", "23"})
    assert k4.is_flat(["12", "34"])
    assert not k4.is_flat(["12", "23"])


def test_uniform_bases(u24):
    assert len(u24.bases()) == 6
    assert u24.is_basis(["0", "3"])
    assert not u24.is_basis(["0"])


def test_unknown_label_raises_error(k4):
    with pytest.raises(UnknownLabelError) as e:
        k4.rank(["99"])
    assert "Label '99' is not in the ground set" in str(e)


def test_rank_function_violating_submodularity_raises_error():
    with pytest.raises(MatroidAxiomError):
        Matroid(
            GroundSet(("a", "b")),
            lambda mask: 2 if mask == 3 else 0,
            Provenance("custom"),
        )


def test_single_submodularity_violation_on_six_elements_raises_error():
    def rank(mask):
        return 1 if mask == 0b11 else min(bin(mask).count("1"), 3)

    with pytest.raises(MatroidAxiomError) as e:
        Matroid(GroundSet(tuple("abcdef")), rank, Provenance("custom"))
    assert "Rank function is not submodular on" in str(e)


def test_nonzero_empty_rank_raises_error():
    with pytest.raises(MatroidAxiomError) as e:
        Matroid(GroundSet(("a",)), lambda mask: 1, Provenance("custom"))
    assert "Rank of the empty set must be 0" in str(e)


def test_duplicate_labels_raise_error():
    with pytest.raises(ValueError, match="labels repeat"):
        GroundSet(("a", "a"))


def test_connected_components_agree_with_circuit_definition(k4, u23, boolean3):
    m = direct_sum(
        constructors.uniform(2, 3, ["x", "y", "z"]),
        constructors.uniform(1, 2, ["u", "v"]),
    )
    for matroid in (k4, u23, boolean3, m):
        assert matroid.component_masks() == matroid.circuit_component_masks()
    assert sorted(map(sorted, m.connected_components())) == [
        ["u", "v"],
        ["x", "y", "z"],
    ]


def test_boolean_matroid_is_totally_disconnected(boolean3):
    assert boolean3.is_totally_disconnected()
    assert len(boolean3.connected_components()) == 3


def test_k4_is_connected_and_simple(k4):
    assert k4.is_connected()
    assert k4.is_simple()
    assert not k4.is_totally_disconnected()


def test_contraction_of_an_edge_creates_parallel_pairs(k4):
    contracted = contract(k4, ["12"])
    assert contracted.rank() == 2
    classes = sorted(sorted(c) for c in contracted.parallel_classes())
    assert classes == [["13", "23"], ["14", "24"], ["34"]]


def test_simplify_keeps_one_element_per_class(k4):
    simple, quotient = simplify(contract(k4, ["12"]))
    assert simple.labels == ("13", "14", "34")
    assert quotient["23"] == "13"
    assert quotient["24"] == "14"
    assert simple.is_simple()


def test_minor_is_restriction_then_contraction(k4):
    triangle = ["12", "13", "23"]
    result = minor(k4, ["12"], triangle)
    assert result.labels == ("13", "23")
    assert result.rank() == 1


def test_delete_and_restrict_agree(k4):
    deleted = delete(k4, ["34"])
    restricted = restrict(k4, ["12", "13", "14", "23", "24"])
    assert deleted.labels == restricted.labels
    assert deleted.rank() == restricted.rank() == 3


def test_truncate_lowers_rank(k4):
    truncated = truncate(k4, 2)
    assert truncated.rank() == 2
    assert truncated.rank(["12", "34"]) == 2


def test_truncate_rejects_out_of_range_rank(k4):
    with pytest.raises(ValueError, match="Truncation rank"):
        truncate(k4, 4)


def test_loops_are_detected():
    m = direct_sum(constructors.uniform(0, 1, ["l"]), constructors.uniform(1, 1, ["x"]))
    assert m.loops() == frozenset({"l"})
    with pytest.raises(LoopError):
        m.require_loop_free()


def test_parallel_connection_along_the_point(parallel_u23):
    assert is_nontrivial_parallel_connection(parallel_u23)
    assert len(parallel_u23.circuits()) == 3


def test_k4_is_not_a_parallel_connection(k4):
    assert not is_nontrivial_parallel_connection(k4)


def test_k4_has_24_automorphisms(k4):
    assert len(matroid_automorphisms(k4)) == 24


def test_rank_preservation_witness_finds_a_bad_bijection(k4):
    swap = {"12": "12", "13": "23", "23": "13", "14": "24", "24": "14", "34": "34"}
    assert rank_preservation_witness(swap, k4, k4) is None
    bad = {label: label for label in k4.labels} | {"12": "13", "13": "12"}
    assert rank_preservation_witness(bad, k4, k4) is not None


def test_graphic_and_uniform_isomorphism(u23):
    triangle = constructors.graphic(3, [(1, 2), (1, 3), (2, 3)])
    assert is_isomorphic(triangle, u23)
    assert not is_isomorphic(triangle, constructors.uniform(2, 4))


def test_to_dict_nests_parents(k4):
    document = contract(k4, ["12"]).to_dict()
    assert document["kind"] == "contract"
    assert document["data"]["elements"] == ["12"]
    assert document["data"]["parent"]["kind"] == "graphic"


def test_relabel_keeps_the_rank_function(u23):
    renamed = relabel(u23, ["a", "b", "c"])
    assert renamed.labels == ("a", "b", "c")
    assert renamed.rank(["a", "c"]) == u23.rank(["0", "2"]) == 2
    with pytest.raises(ValueError, match="needs 3 labels, got 2"):
        relabel(u23, ["a", "b"])


def test_matroid_isomorphisms_between_triangle_and_u23(u23):
    triangle = constructors.complete_graph(3)
    assert len(list(matroid_isomorphisms(u23, triangle))) == 6
    assert not list(matroid_isomorphisms(u23, constructors.uniform(3, 3)))
