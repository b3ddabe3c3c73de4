import pytest

from bergmankit import chow, constructors, fans
from bergmankit.chow import DegreeError, FlagMonomial, NotUnimodularError
from bergmankit.fans import Fan, Ray, UnsupportedStructureError

TRIANGLE = ["12", "13", "23"]


def test_edge_squared_has_degree_minus_two(k4):
    assert chow.eur_degree(k4, FlagMonomial.of((["12"], 2))) == -2


def test_corank_one_flat_squared_has_degree_minus_one(k4):
    assert chow.eur_degree(k4, FlagMonomial.of((TRIANGLE, 2))) == -1
    assert chow.eur_degree(k4, FlagMonomial.of((["12", "34"], 2))) == -1


def test_maximal_flag_has_degree_one(k4):
    assert chow.eur_degree(k4, FlagMonomial.of((["12"], 1), (TRIANGLE, 1))) == 1


def test_non_chain_monomial_has_degree_zero(k4):
    assert chow.eur_degree(k4, FlagMonomial.of((["12"], 1), (["34"], 1))) == 0


def test_wrong_degree_raises_error(k4):
    with pytest.raises(DegreeError) as e:
        chow.eur_degree(k4, FlagMonomial.of((["12"], 3)))
    assert "has degree 3, expected 2" in str(e)


def test_non_flat_generator_raises_error(k4):
    with pytest.raises(DegreeError, match="is not a proper nonempty flat"):
        chow.eur_degree(k4, FlagMonomial.of((["12", "13"], 2)))


def test_flag_monomial_orders_flats_by_size():
    monomial = FlagMonomial.of((TRIANGLE, 1), (["12"], 1))
    assert monomial.flats[0] == frozenset({"12"})
    assert monomial.is_chain()
    assert str(monomial) == "x_{12} x_{12,13,23}"
    assert monomial.times(["12"]).exponents == (2, 1)


def test_flag_monomial_rejects_repeated_flats():
    with pytest.raises(ValueError, match="must be distinct"):
        FlagMonomial.of((["12"], 1), (["12"], 1))


@pytest.mark.parametrize("name", ["k4", "fano", "u34", "dowling_z2"])
def test_linear_relations_annihilate_degree_maps(request, name):
    matroid = request.getfixturevalue(name)
    anchor = matroid.labels[0]
    for partial in chow.partial_monomials(matroid, limit=20, seed=1):
        for other in matroid.labels[1:]:
            assert chow.relation_annihilation_check(matroid, partial, anchor, other)


def test_flag_monomials_of_degree_two_in_k4(k4):
    monomials = list(chow.flag_monomials(k4, 2))
    squares = [m for m in monomials if len(m.flats) == 1]
    chains = [m for m in monomials if len(m.flats) == 2]
    assert len(squares) == 13
    assert len(chains) == 18


def test_fan_degree_matches_closed_form_on_fine_fan(k4, k4_fine):
    for monomial in chow.flag_monomials(k4, 2):
        factors = list(zip(monomial.flats, monomial.exponents, strict=True))
        assert chow.fan_degree_of_flags(k4_fine, factors) == chow.eur_degree(k4, monomial)


def test_fan_degree_of_non_face_is_zero(k4_fine):
    assert chow.fan_degree_of_flags(k4_fine, [(["12"], 1), (["34"], 1)]) == 0


def test_fan_degree_rejects_unknown_generator(k4_nested):
    with pytest.raises(DegreeError, match="is not a ray of the fan"):
        chow.fan_degree_of_flags(k4_nested, [(["12", "34"], 2)])


def test_fan_degree_rejects_non_unimodular_fan():
    rays = (
        Ray(fans.QuotientVector.of([0, 2, 0]), None, None),
        Ray(fans.QuotientVector.of([0, 0, 1]), None, None),
    )
    fan = Fan(("a", "b", "c"), rays, (frozenset({0, 1}),), fans.FINE)
    with pytest.raises(NotUnimodularError):
        chow.fan_degree(fan, {0: 1, 1: 1})


@pytest.mark.parametrize(
    ("first", "second", "expected"),
    [
        (["12"], ["12"], -1),
        (["12"], ["34"], 1),
        (["12"], ["13"], 0),
        (["12"], TRIANGLE, 1),
        (["34"], TRIANGLE, 0),
        (TRIANGLE, TRIANGLE, -1),
        (TRIANGLE, ["12", "14", "24"], 0),
    ],
)
def test_coarse_rank3_degrees_on_k4(k4, k4_nested, first, second, expected):
    assert chow.coarse_rank3_degree(k4, first, second) == expected
    factors = [(first, 2)] if first == second else [(first, 1), (second, 1)]
    assert chow.fan_degree_of_flags(k4_nested, factors) == expected


def test_coarse_rank3_degrees_on_fano(fano):
    coarse = fans.coarse_fan(fano)
    point = ["001"]
    line = sorted(fano.closure(["001", "010"]).elements)
    assert chow.coarse_rank3_degree(fano, point, point) == -2
    assert chow.coarse_rank3_degree(fano, line, line) == -1
    assert chow.coarse_rank3_degree(fano, point, line) == 1
    assert chow.fan_degree_of_flags(coarse, [(point, 2)]) == -2
    assert chow.fan_degree_of_flags(coarse, [(line, 2)]) == -1


def test_coarse_rank3_degree_rejects_parallel_connection(parallel_u23):
    with pytest.raises(UnsupportedStructureError, match="product fan"):
        chow.coarse_rank3_degree(parallel_u23, ["a"], ["a"])


def test_coarse_rank3_degree_rejects_two_point_lines(k4):
    with pytest.raises(DegreeError, match="is not a ray of the coarse fan"):
        chow.coarse_rank3_degree(k4, ["12", "34"], ["12"])


def test_coarse_rank3_degree_needs_rank_three(u24):
    with pytest.raises(DegreeError, match="rank 3"):
        chow.coarse_rank3_degree(u24, ["0"], ["0"])


def test_chow_presentation_of_k4_fine_fan(k4_fine):
    presentation = chow.chow_presentation(k4_fine)
    assert len(presentation.generators) == 13
    assert len(presentation.relations) == 5
    assert all(len(face) == 2 for face in presentation.non_faces)
    assert len(presentation.non_faces) == 13 * 12 // 2 - 18
    assert "x_{12}" in presentation.generators


CORPUS = [
    "u23",
    "u24",
    "u34",
    "boolean3",
    "boolean4",
    "k4",
    "k5",
    "fano",
    "pg32",
    "dowling_z2",
    "parallel_u23",
]


@pytest.mark.parametrize("name", CORPUS)
def test_every_maximal_flag_has_degree_one(request, name):
    matroid = request.getfixturevalue(name)
    fine = fans.fine_fan(matroid)
    for cone in fine.maximal_cones():
        monomial = FlagMonomial.of(*((fine.rays[i].flat, 1) for i in cone))
        assert chow.eur_degree(matroid, monomial) == 1


def _assert_closed_form_matches_fan_degree(matroid):
    fine = fans.fine_fan(matroid)
    for monomial in chow.flag_monomials(matroid, matroid.rank() - 1):
        factors = list(zip(monomial.flats, monomial.exponents, strict=True))
        expected = chow.eur_degree(matroid, monomial)
        assert chow.fan_degree_of_flags(fine, factors) == expected


def test_fan_degree_matches_closed_form_in_rank_four():
    _assert_closed_form_matches_fan_degree(constructors.uniform(4, 5))


@pytest.mark.slow
def test_fan_degree_matches_closed_form_on_k5(k5):
    _assert_closed_form_matches_fan_degree(k5)
