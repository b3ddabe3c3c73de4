"""CSM Minkowski weights of matroid fans and their balancing.

Weights are computed from beta invariants of the flag minors, or from the support
alone through wedge dimensions of the star of a cone.
"""

import itertools
import logging
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

from bergmankit import linalg
from bergmankit.fans import Fan, QuotientVector, fine_fan
from bergmankit.invariants import IntPolynomial, beta, wedge_span_dimension
from bergmankit.maps import RayPermutation
from bergmankit.matroid import Matroid, minor

logger = logging.getLogger(__name__)


class InconsistentWeightError(Exception):
    """Exception raised when the local polynomial of a cone is not divisible as needed."""


@dataclass(frozen=True)
class MinkowskiWeight:
    fan: Fan
    k: int
    weights: Mapping[frozenset[int], int]

    def __getitem__(self, cone: frozenset[int]) -> int:
        return self.weights[cone]

    def to_dict(self) -> dict[str, Any]:
        cones = sorted(self.weights, key=sorted)
        return {
            "k": self.k,
            "cones": [sorted(cone) for cone in cones],
            "weights": [self.weights[cone] for cone in cones],
        }


@dataclass(frozen=True)
class BalancingReport:
    ok: bool
    checked: int
    failures: tuple[frozenset[int], ...] = ()


def _check_k(matroid: Matroid, k: int) -> int:
    top = matroid.rank() - 1
    if not 0 <= k <= top:
        k_range_message = f"k must lie between 0 and {top}, got {k}"
        raise ValueError(k_range_message)
    return top


def flag_weight(matroid: Matroid, flag: list[frozenset[str]]) -> int:
    """(-1)^(d-k) times the product of beta(M|F_i / F_(i-1)) for i = 1..k+1."""
    top = matroid.rank() - 1
    chain = [frozenset(), *flag, frozenset(matroid.labels)]
    product = 1
    for lower, upper in itertools.pairwise(chain):
        product *= beta(minor(matroid, lower, upper))
        if product == 0:
            return 0
    return (-1) ** (top - len(flag)) * product


def csm_weights(matroid: Matroid, k: int) -> MinkowskiWeight:
    """Flag-formula weights on the k-cones of the fine fan."""
    _check_k(matroid, k)
    structure = fine_fan(matroid)
    weights = {}
    for cone in structure.cones_of_dim(k):
        flag = sorted(
            (structure.rays[i].flat or frozenset() for i in cone), key=len
        )
        weights[cone] = flag_weight(matroid, flag)
    logger.debug("Computed %s CSM weights of dimension %s", len(weights), k)
    return MinkowskiWeight(structure, k, weights)


def local_polynomial(fan: Fan, cone: frozenset[int], top: int) -> IntPolynomial:
    """sum_p (-1)^p dim F_p(star of cone) t^(top - p)."""
    containing = [maximal for maximal in fan.maximal if cone <= maximal]
    coefficients = [0] * (top + 1)
    for p in range(top + 1):
        coefficients[top - p] = (-1) ** p * wedge_span_dimension(fan, containing, p)
    return IntPolynomial(tuple(coefficients))


def csm_weight_from_support(
    matroid: Matroid, cone: frozenset[int], k: int, fan: Fan | None = None
) -> int:
    """The weight of a k-cone read off the support: the local polynomial divided by
    (t - 1)^k, evaluated at 1.
    """
    top = _check_k(matroid, k)
    structure = fan if fan is not None else fine_fan(matroid)
    if len(cone) != k or cone not in structure.cones:
        not_a_cone_message = f"{sorted(cone)} is not a {k}-dimensional cone of the fan"
        raise ValueError(not_a_cone_message)
    local = local_polynomial(structure, cone, top)
    try:
        quotient = local.exact_divide(IntPolynomial.t_minus_one_power(k))
    except ValueError:
        inconsistent_message = (
            f"Local polynomial {local} of cone {sorted(cone)} is not divisible by "
            f"(t - 1)^{k}"
        )
        raise InconsistentWeightError(inconsistent_message) from None
    return quotient(1)


def csm_weights_from_support(
    matroid: Matroid, k: int, fan: Fan | None = None
) -> MinkowskiWeight:
    structure = fan if fan is not None else fine_fan(matroid)
    weights = {
        cone: csm_weight_from_support(matroid, cone, k, structure)
        for cone in structure.cones_of_dim(k)
    }
    return MinkowskiWeight(structure, k, weights)


def balancing_check(weight: MinkowskiWeight) -> BalancingReport:
    """Check the weighted sum of outgoing rays lies in the span of each (k-1)-cone."""
    fan = weight.fan
    failures = []
    faces = fan.cones_of_dim(weight.k - 1) if weight.k > 0 else []
    for face in faces:
        total = QuotientVector.zero(len(fan.labels))
        for cone, value in weight.weights.items():
            if face < cone:
                (outgoing,) = cone - face
                total += fan.rays[outgoing].vector.scaled(value)
        span = [fan.rays[i].vector.reduced() for i in sorted(face)]
        if not linalg.in_span(total.reduced(), span):
            failures.append(face)
    if failures:
        logger.warning(
            "Weight of dimension %s is unbalanced at %s faces, first %s",
            weight.k,
            len(failures),
            sorted(failures[0]),
        )
    return BalancingReport(not failures, len(faces), tuple(failures))


def transport_weight(
    weight: MinkowskiWeight, permutation: RayPermutation, target: Fan
) -> MinkowskiWeight:
    """Push a weight along a fan isomorphism given by its action on rays."""
    return MinkowskiWeight(
        target,
        weight.k,
        {permutation.cone_image(cone): value for cone, value in weight.weights.items()},
    )

