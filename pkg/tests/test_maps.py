import pytest

from bergmankit import constructors, fans, maps
from bergmankit.fans import QuotientVector
from bergmankit.maps import (
    CremonaCriterionError,
    LatticeMap,
    LatticeMapError,
    NotABasisError,
    NotAParallelConnectionError,
    RayPermutation,
)

STAR_BASIS = ["14", "24", "34"]
VERTEX_ONE_BASIS = ["12", "13", "14"]
PATH_BASIS = ["12", "23", "34"]
VERTEX_SWAP = {"12": "12", "13": "23", "23": "13", "14": "24", "24": "14", "34": "34"}
VERTEX_CYCLE = {"12": "23", "13": "24", "14": "12", "23": "34", "24": "13", "34": "14"}


def test_matroid_isomorphism_gives_a_permutation_matrix(k4):
    lattice_map = maps.from_matroid_iso(VERTEX_SWAP, k4, k4)
    assert lattice_map.ones_multiplier == 1
    assert lattice_map.is_quotient_unimodular()
    assert lattice_map.is_involution()


def test_non_isomorphism_raises_error(k4):
    bad = {label: label for label in k4.labels} | {"12": "13", "13": "12"}
    with pytest.raises(LatticeMapError) as e:
        maps.from_matroid_iso(bad, k4, k4)
    assert "Label map changes the rank of" in str(e)


def test_non_bijection_raises_error(k4):
    with pytest.raises(LatticeMapError, match="not a bijection"):
        maps.from_matroid_iso({"12": "12"}, k4, k4)


def test_lattice_map_rejects_unequal_row_sums():
    with pytest.raises(LatticeMapError) as e:
        LatticeMap(("a", "b"), ("a", "b"), ((1, 0), (1, 1)), 1)
    assert "Row sums [1, 2] do not equal the ones multiplier 1" in str(e)


def test_lattice_map_rejects_zero_multiplier():
    with pytest.raises(LatticeMapError, match="all-ones vector to zero"):
        LatticeMap(("a", "b"), ("a", "b"), ((1, -1), (-1, 1)), 0)


def test_lattice_map_dictionary_round_trip(k4):
    lattice_map = maps.cremona_map(k4, STAR_BASIS)
    assert LatticeMap.from_dict(lattice_map.to_dict()) == lattice_map


def test_malformed_map_document_raises_error():
    with pytest.raises(LatticeMapError, match="Malformed map document"):
        LatticeMap.from_dict({"source": ["a"]})


def test_negation_is_an_involution():
    negation = maps.negation_map(["a", "b", "c"])
    point = QuotientVector.of([0, 1, 5])
    assert negation.apply(point) == -point
    assert negation.is_involution()


@pytest.mark.parametrize(
    ("basis", "holds"),
    [(STAR_BASIS, True), (VERTEX_ONE_BASIS, True), (PATH_BASIS, False)],
)
def test_cremona_criterion_on_k4(k4, basis, holds):
    criterion = maps.cremona_criterion(k4, basis)
    assert criterion.holds is holds
    if holds:
        assert sorted(map(sorted, criterion.partition)) == sorted(
            [label] for label in k4.labels if label not in basis
        )
    else:
        assert "residues miss" in criterion.witness


@pytest.mark.parametrize("name", ["k4", "u34", "fano", "dowling_z2"])
def test_cremona_criterion_matches_support_preservation_on_every_basis(request, name):
    matroid = request.getfixturevalue(name)
    for basis in matroid.bases():
        ordered = sorted(basis)
        criterion = maps.cremona_criterion(matroid, ordered).holds
        verdict = maps.cremona_support_verdict(matroid, ordered, samples=2, seed=4)
        assert verdict is criterion


@pytest.mark.parametrize("name", ["u34", "fano"])
def test_no_basis_passes_the_cremona_criterion(request, name):
    matroid = request.getfixturevalue(name)
    assert not any(
        maps.cremona_criterion(matroid, sorted(basis)).holds
        for basis in matroid.bases()
    )


def test_cremona_on_dowling_joints(dowling_z2):
    joints = ["b1", "b2", "b3"]
    criterion = maps.cremona_criterion(dowling_z2, joints)
    assert criterion.holds
    assert maps.cremona_support_verdict(dowling_z2, joints, samples=2, seed=2)
    assert maps.cremona_map(dowling_z2, joints).is_involution()


def test_cremona_map_is_an_involution_with_multiplier_two(k4):
    cremona = maps.cremona_map(k4, STAR_BASIS)
    assert cremona.ones_multiplier == 2
    assert cremona.is_involution()
    assert maps.preserves_support(cremona, k4, k4, samples=2, seed=0).ok


def test_cremona_map_for_failing_basis_raises_error(k4):
    with pytest.raises(CremonaCriterionError) as e:
        maps.cremona_map(k4, PATH_BASIS)
    assert "Cremona criterion fails for basis" in str(e)


def test_cremona_for_non_basis_raises_error(k4):
    with pytest.raises(NotABasisError, match="is not a basis"):
        maps.cremona_criterion(k4, ["12", "13", "23"])


def test_cremona_is_an_automorphism_of_the_nested_fan_only(k4, k4_fine, k4_nested):
    cremona = maps.cremona_map(k4, STAR_BASIS)
    assert maps.verify_fan_isomorphism(cremona, k4_nested, k4_nested).ok
    report = maps.verify_fan_isomorphism(cremona, k4_fine, k4_fine)
    assert not report.ok
    assert report.ray_images is None


def test_cremona_sends_points_to_lines_in_the_nested_fan(k4, k4_nested):
    cremona = maps.cremona_map(k4, STAR_BASIS)
    permutation = maps.ray_permutation(cremona, k4_nested)
    assert maps.rank_corank_transport(permutation, k4_nested, k4)
    ranks = {
        (k4_nested.rays[i].rank, k4_nested.rays[permutation(i)].rank)
        for i in range(len(k4_nested.rays))
    }
    assert (1, 2) in ranks


def _vertex_permutations(k4, fan):
    return [
        maps.ray_permutation(maps.from_matroid_iso(automorphism, k4, k4), fan)
        for automorphism in (VERTEX_SWAP, VERTEX_CYCLE)
    ]


def test_automorphisms_and_cremona_generate_a_group_of_order_120(k4, k4_nested):
    generators = _vertex_permutations(k4, k4_nested)
    generators.append(maps.ray_permutation(maps.cremona_map(k4, STAR_BASIS), k4_nested))
    assert maps.group_closure_order(generators) == 120
    assert len(maps.group_closure(generators)) == 120


def test_automorphisms_alone_generate_s4(k4, k4_nested):
    generators = _vertex_permutations(k4, k4_nested)
    assert maps.group_closure_order(generators) == 24
    closure = maps.group_closure(generators)
    assert len(set(closure)) == 24
    assert RayPermutation.identity(10) in closure
    assert all(g.after(element) in closure for g in generators for element in closure)


def test_trivial_group_closure():
    assert maps.group_closure_order([]) == 1
    assert maps.group_closure([], 10) == [RayPermutation.identity(10)]


def test_ray_permutation_rejects_non_automorphism(k4, k4_fine):
    with pytest.raises(LatticeMapError, match="not a fan automorphism"):
        maps.ray_permutation(maps.cremona_map(k4, STAR_BASIS), k4_fine)


def test_verify_fan_isomorphism_needs_a_unimodular_map(k4_fine):
    labels = k4_fine.labels
    doubled = LatticeMap(
        labels,
        labels,
        tuple(tuple(2 if i == j else 0 for i in range(6)) for j in range(6)),
        2,
    )
    with pytest.raises(LatticeMapError, match="unimodular"):
        maps.verify_fan_isomorphism(doubled, k4_fine, k4_fine)


def test_parallel_split_round_trips(parallel_u23):
    split = maps.parallel_split_map(parallel_u23)
    point = QuotientVector.of([0, 2, 1, 3, 5])
    first, second = split.apply(point)
    assert split.first.target_labels == ("a", "b", "p")
    assert split.second.target_labels == ("c", "d", "q")
    assert split.inverse_apply(first, second) == point


def test_parallel_split_preserves_support(parallel_u23):
    report = maps.verify_split_support(
        parallel_u23, samples=maps.MIN_SPLIT_SAMPLES, seed=7
    )
    assert report.ok
    assert report.forward_on >= maps.MIN_SPLIT_SAMPLES
    assert report.forward_off >= maps.MIN_SPLIT_SAMPLES
    assert report.backward_on >= maps.MIN_SPLIT_SAMPLES
    assert report.backward_off >= maps.MIN_SPLIT_SAMPLES


def test_parallel_split_of_other_matroid_raises_error(k4):
    with pytest.raises(NotAParallelConnectionError) as e:
        maps.parallel_split_map(k4)
    assert "Matroid of kind 'graphic' carries no parallel connection data" in str(e)


def test_regluing_along_another_point_is_a_fan_isomorphism(parallel_u23):
    first = constructors.uniform(2, 3, ["a", "b", "p"])
    second = constructors.uniform(2, 3, ["c", "d", "q"])
    other = constructors.parallel_connection(first, second, "a", "c")
    assert other.labels == ("a", "b", "p", "d", "q")
    lattice_map = maps.parallel_connection_fan_isomorphism(parallel_u23, other)
    source = fans.coarse_fan(parallel_u23)
    target = fans.coarse_fan(other)
    assert maps.verify_fan_isomorphism(lattice_map, source, target).ok


def test_regluing_with_different_factors_raises_error(parallel_u23):
    other = constructors.parallel_connection(
        constructors.uniform(2, 3, ["a", "b", "p"]),
        constructors.uniform(2, 4, ["c", "d", "e", "q"]),
        "p",
        "q",
    )
    with pytest.raises(LatticeMapError, match="different factors"):
        maps.parallel_connection_fan_isomorphism(parallel_u23, other)


def test_cremona_matrix_row_sums(k4):
    star_sums = {sum(row) for row in maps.cremona_matrix(k4, STAR_BASIS)}
    assert star_sums == {2}
    path_sums = {sum(row) for row in maps.cremona_matrix(k4, PATH_BASIS)}
    assert len(path_sums) > 1
