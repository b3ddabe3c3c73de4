import pytest

from bergmankit import csm, fans, maps
from bergmankit.csm import InconsistentWeightError

TRIANGLE = frozenset({"12", "13", "23"})


def _weight_of_flat(weight, flat):
    (cone,) = [
        cone for cone in weight.weights if weight.fan.rays[next(iter(cone))].flat == flat
    ]
    return weight[cone]


def test_k4_weights_on_rays(k4):
    weight = csm.csm_weights(k4, 1)
    assert _weight_of_flat(weight, frozenset({"12"})) == -1
    assert _weight_of_flat(weight, TRIANGLE) == -1
    assert _weight_of_flat(weight, frozenset({"12", "34"})) == 0


def test_k4_top_weights_are_beta_products(k4):
    weight = csm.csm_weights(k4, 2)
    assert set(weight.weights.values()) == {1}
    assert len(weight.weights) == 18


def test_k4_weight_of_the_origin_is_signed_beta(k4):
    weight = csm.csm_weights(k4, 0)
    assert weight[frozenset()] == 2


def test_k_out_of_range_raises_error(k4):
    with pytest.raises(ValueError, match="k must lie between 0 and 2"):
        csm.csm_weights(k4, 3)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_support_route_agrees_with_flag_formula_on_k4(k4, k4_fine, k):
    flag_route = csm.csm_weights(k4, k)
    support_route = csm.csm_weights_from_support(k4, k, flag_route.fan)
    assert support_route.weights == flag_route.weights


@pytest.mark.parametrize("name", ["u34", "fano", "parallel_u23"])
def test_support_route_agrees_on_rays(request, name):
    matroid = request.getfixturevalue(name)
    flag_route = csm.csm_weights(matroid, 1)
    support_route = csm.csm_weights_from_support(matroid, 1, flag_route.fan)
    assert support_route.weights == flag_route.weights


@pytest.mark.parametrize("name", ["k4", "u34", "fano"])
@pytest.mark.parametrize("k", [1, 2])
def test_weights_are_balanced(request, name, k):
    report = csm.balancing_check(csm.csm_weights(request.getfixturevalue(name), k))
    assert report.ok
    assert report.checked > 0


def test_unbalanced_weight_is_reported(k4):
    weight = csm.csm_weights(k4, 1)
    tampered = dict(weight.weights)
    first = next(iter(sorted(tampered, key=sorted)))
    tampered[first] += 1
    report = csm.balancing_check(csm.MinkowskiWeight(weight.fan, 1, tampered))
    assert not report.ok
    assert report.failures == (frozenset(),)


def test_support_route_rejects_a_non_cone(k4, k4_fine):
    with pytest.raises(ValueError, match="is not a 1-dimensional cone"):
        csm.csm_weight_from_support(k4, frozenset({0, 1}), 1, k4_fine)


def test_inconsistent_local_polynomial_raises_error(k4, k4_fine, mocker):
    mocker.patch("bergmankit.csm.wedge_span_dimension", return_value=1)
    with pytest.raises(InconsistentWeightError) as e:
        csm.csm_weight_from_support(k4, frozenset({0}), 1, k4_fine)
    assert "is not divisible by (t - 1)^1" in str(e)


def test_weights_transport_along_an_automorphism(k4, k4_fine):
    swap = {"12": "12", "13": "23", "23": "13", "14": "24", "24": "14", "34": "34"}
    permutation = maps.ray_permutation(maps.from_matroid_iso(swap, k4, k4), k4_fine)
    weight = csm.csm_weights(k4, 1)
    assert csm.transport_weight(weight, permutation, k4_fine).weights == weight.weights


def test_weights_dictionary(k4):
    document = csm.csm_weights(k4, 1).to_dict()
    assert document["k"] == 1
    assert len(document["cones"]) == len(document["weights"]) == 13
    assert csm.csm_weights(k4, 1).fan.structure == fans.FINE
