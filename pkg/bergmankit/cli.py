"""Command-line access to matroids, Bergman fans and their invariants.

Exit codes: 0 on success, 1 on invalid input, 2 when a requested verification fails.
"""

import argparse
import itertools
import json
import logging
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, NoReturn

from bergmankit import chow, config, constructors, csm, fans, invariants, maps
from bergmankit.chow import DegreeError, NotUnimodularError
from bergmankit.constructors import ConstructorError, load_matroid
from bergmankit.csm import InconsistentWeightError
from bergmankit.fans import Fan, NotAChainError, QuotientVector, UnsupportedStructureError
from bergmankit.linalg import SizeCapExceededError
from bergmankit.maps import (
    CremonaCriterionError,
    LatticeMap,
    LatticeMapError,
    NotABasisError,
    NotAParallelConnectionError,
)
from bergmankit.matroid import (
    LoopError,
    Matroid,
    MatroidAxiomError,
    UnknownLabelError,
    contract,
    delete,
    matroid_automorphisms,
    simplify,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_VERIFICATION_FAILED = 2

INPUT_ERRORS = (
    ConstructorError,
    DegreeError,
    InconsistentWeightError,
    LatticeMapError,
    LoopError,
    MatroidAxiomError,
    NotAChainError,
    NotAParallelConnectionError,
    NotABasisError,
    NotUnimodularError,
    OSError,
    SizeCapExceededError,
    UnknownLabelError,
    UnsupportedStructureError,
    ValueError,
)


class UsageError(Exception):
    """Exception raised when command-line arguments cannot be parsed."""


class Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


@dataclass(frozen=True)
class CommandResult:
    payload: Any
    table: str
    exit_code: int = EXIT_OK


Handler = Callable[[argparse.Namespace], CommandResult]


def read_json(path: str) -> Any:  # noqa: ANN401
    return json.loads(Path(path).read_text(encoding="utf-8"))


def read_matroid(path: str) -> Matroid:
    return load_matroid(read_json(path))


def read_fan(path: str) -> Fan:
    try:
        return Fan.from_dict(read_json(path))
    except (KeyError, TypeError) as error:
        malformed_message = f"Malformed fan document: missing or invalid {error}"
        raise ValueError(malformed_message) from None


def split_labels(text: str) -> list[str]:
    return [label.strip() for label in text.split(",") if label.strip()]


def split_flag(text: str) -> list[list[str]]:
    return [split_labels(flat) for flat in text.split("|") if flat.strip()]


def parse_monomial(text: str) -> chow.FlagMonomial:
    """Parse "12^2|12,13,23" into x_{12}^2 x_{12,13,23}."""
    factors = []
    for factor in text.split("|"):
        flat, _, exponent = factor.partition("^")
        factors.append((split_labels(flat), int(exponent or 1)))
    return chow.FlagMonomial.of(*factors)


def format_flat(
    flat: Sequence[str] | frozenset[str] | None, labels: Sequence[str]
) -> str:
    if flat is None:
        return "-"
    return "{" + ",".join(sorted(flat, key=list(labels).index)) + "}"


REQUIRED_BUILD_OPTIONS = {
    "uniform": ("rank", "size"),
    "complete": ("vertices",),
    "graphic": ("vertices", "edges"),
    "linear": ("prime", "columns"),
    "projective": ("dimension", "prime"),
    "dowling": ("dimension",),
    "parallel": ("first", "second", "first_point", "second_point"),
}


def build_matroid(args: argparse.Namespace) -> Matroid:  # noqa: PLR0911
    if missing := [
        name
        for name in REQUIRED_BUILD_OPTIONS.get(args.kind, ())
        if getattr(args, name) is None
    ]:
        options = ", ".join("--" + name.replace("_", "-") for name in missing)
        missing_message = f"Kind '{args.kind}' needs {options}"
        raise ConstructorError(missing_message)
    match args.kind:
        case "uniform":
            return constructors.uniform(args.rank, args.size)
        case "complete":
            return constructors.complete_graph(args.vertices)
        case "graphic":
            edges = [
                (int(a), int(b))
                for a, b in (edge.split("-") for edge in split_labels(args.edges))
            ]
            return constructors.graphic(args.vertices, edges, simple=args.simple)
        case "linear":
            columns = [
                [int(entry) for entry in split_labels(column)]
                for column in args.columns.split(";")
            ]
            return constructors.linear(args.prime, columns)
        case "projective":
            return constructors.projective_geometry(args.dimension, args.prime)
        case "dowling":
            return constructors.dowling(
                args.dimension, constructors.cyclic_group_table(args.cyclic_order)
            )
        case "parallel":
            return constructors.parallel_connection(
                read_matroid(args.first),
                read_matroid(args.second),
                args.first_point,
                args.second_point,
            )
    unknown_kind_message = f"Unknown matroid kind '{args.kind}'"
    raise ConstructorError(unknown_kind_message)


def describe(matroid: Matroid) -> dict[str, Any]:
    return {
        "labels": list(matroid.labels),
        "rank": matroid.rank(),
        "flat_counts": list(matroid.flats_lattice().counts()),
        "circuits": len(matroid.circuit_masks()),
        "components": [
            sorted(c, key=matroid.labels.index) for c in matroid.connected_components()
        ],
        "simple": matroid.is_simple(),
        "connected": matroid.is_connected(),
    }


def handle_matroid_build(args: argparse.Namespace) -> CommandResult:
    matroid = build_matroid(args)
    return CommandResult(
        matroid.to_dict(),
        f"{matroid.provenance.kind} matroid of rank {matroid.rank()} on "
        f"{matroid.size} elements",
    )


def handle_matroid_describe(args: argparse.Namespace) -> CommandResult:
    summary = describe(read_matroid(args.matroid))
    table = "\n".join(f"{key}: {value}" for key, value in summary.items())
    return CommandResult(summary, table)


def handle_matroid_simplify(args: argparse.Namespace) -> CommandResult:
    simple, quotient = simplify(read_matroid(args.matroid))
    table = "\n".join(f"{label} -> {image}" for label, image in quotient.items())
    return CommandResult({"matroid": simple.to_dict(), "quotient": quotient}, table)


def handle_matroid_minor(args: argparse.Namespace) -> CommandResult:
    matroid = read_matroid(args.matroid)
    if args.delete:
        matroid = delete(matroid, split_labels(args.delete))
    if args.contract:
        matroid = contract(matroid, split_labels(args.contract))
    return CommandResult(
        matroid.to_dict(),
        f"minor of rank {matroid.rank()} on {', '.join(matroid.labels)}",
    )


def build_fan(matroid: Matroid, structure: str) -> Fan:
    builders = {
        fans.FINE: fans.fine_fan,
        fans.NESTED: fans.nested_fan,
        fans.COARSE: fans.coarse_fan,
    }
    fan = builders[structure](matroid)
    logger.info(
        "Built %s fan with %s rays and %s maximal cones",
        fan.structure,
        len(fan.rays),
        len(fan.maximal),
    )
    return fan


def handle_fan_build(args: argparse.Namespace) -> CommandResult:
    fan = build_fan(read_matroid(args.matroid), args.structure)
    return CommandResult(
        fan.to_dict(),
        f"{fan.structure} fan with {len(fan.rays)} rays and "
        f"{len(fan.maximal)} maximal cones",
    )


def handle_fan_rays(args: argparse.Namespace) -> CommandResult:
    fan = read_fan(args.fan)
    lines = [
        f"{index}\t{ray.vector}\t{format_flat(ray.flat, fan.labels)}\t{ray.rank}"
        for index, ray in enumerate(fan.rays)
    ]
    profile = fans.ray_rank_profile(fan)
    return CommandResult(
        {
            "rays": fan.to_dict()["rays"],
            "profile": {str(k): v for k, v in profile.items()},
        },
        "\n".join(lines),
    )


def handle_fan_cones(args: argparse.Namespace) -> CommandResult:
    fan = read_fan(args.fan)
    dimension = fan.dimension if args.dim is None else args.dim
    cones = [sorted(cone) for cone in fan.cones_of_dim(dimension)]
    return CommandResult(
        {"dimension": dimension, "cones": cones},
        "\n".join(" ".join(str(i) for i in cone) for cone in cones),
    )


def handle_fan_member(args: argparse.Namespace) -> CommandResult:
    matroid = read_matroid(args.matroid)
    point = QuotientVector.of(Fraction(value) for value in split_labels(args.point))
    inside = fans.membership(matroid, point)
    flag = fans.flag_of_vector(matroid, point) if inside else None
    return CommandResult(
        {
            "member": inside,
            "flag": [sorted(f, key=matroid.labels.index) for f in flag or []],
        },
        f"{point} {'lies' if inside else 'does not lie'} in B(M)",
    )


def handle_fan_star(args: argparse.Namespace) -> CommandResult:
    matroid = read_matroid(args.matroid)
    flag = split_flag(args.flag)
    local = fans.star(matroid, flag)
    report = fans.star_membership_consistent(
        matroid, flag, args.samples or config.default_samples(), config.default_seed()
    )
    payload = {
        "minors": [minor.to_dict() for minor in local.minors],
        "components": len(local.matroid.connected_components()),
        "lineality": fans.lineality_dim(local.matroid),
        "consistent": report.ok,
    }
    table = "\n".join(
        f"{format_flat(lower, matroid.labels)} < {format_flat(upper, matroid.labels)}: "
        f"rank {minor.rank()}"
        for (lower, upper), minor in zip(
            itertools.pairwise(local.flag), local.minors, strict=True
        )
    )
    return CommandResult(
        payload, table, EXIT_OK if report.ok else EXIT_VERIFICATION_FAILED
    )


def handle_invariants_charpoly(args: argparse.Namespace) -> CommandResult:
    matroid = read_matroid(args.matroid)
    full = invariants.characteristic_polynomial(matroid)
    reduced = invariants.reduced(matroid)
    return CommandResult(
        {
            "characteristic": list(full.coefficients),
            "reduced": list(reduced.coefficients),
        },
        f"chi(t) = {full}\nreduced(t) = {reduced}",
    )


def handle_invariants_beta(args: argparse.Namespace) -> CommandResult:
    value = invariants.beta(read_matroid(args.matroid))
    return CommandResult({"beta": value}, f"beta = {value}")


def handle_invariants_mu(args: argparse.Namespace) -> CommandResult:
    matroid = read_matroid(args.matroid)
    if args.k is None:
        values = invariants.mu_sequence(matroid)
        return CommandResult({"mu": values}, " ".join(str(v) for v in values))
    value = invariants.mu(matroid, args.k)
    return CommandResult({"k": args.k, "mu": value}, f"mu^{args.k} = {value}")


def handle_invariants_osdim(args: argparse.Namespace) -> CommandResult:
    report = invariants.os_dimension(read_matroid(args.matroid), args.p)
    return CommandResult(
        {"p": report.p, "dimension": report.dimension, "ambient": report.ambient},
        f"dim F_{report.p} = {report.dimension} (ambient {report.ambient})",
    )


def handle_invariants_verify_os(args: argparse.Namespace) -> CommandResult:
    report = invariants.verify_os_identity(read_matroid(args.matroid))
    rows = [
        {"p": row.p, "mu": row.mu, "dimension": row.dimension, "match": row.match}
        for row in report.rows
    ]
    table = "p\tmu\tdim\tmatch\n" + "\n".join(
        f"{row.p}\t{row.mu}\t{row.dimension}\t{row.match}" for row in report.rows
    )
    return CommandResult(
        {"ok": report.ok, "rows": rows},
        table,
        EXIT_OK if report.ok else EXIT_VERIFICATION_FAILED,
    )


def handle_chow_degree(args: argparse.Namespace) -> CommandResult:
    matroid = read_matroid(args.matroid)
    monomial = parse_monomial(args.monomial)
    value = chow.eur_degree(matroid, monomial)
    return CommandResult(
        {"monomial": str(monomial), "degree": value}, f"deg {monomial} = {value}"
    )


def handle_chow_relations(args: argparse.Namespace) -> CommandResult:
    matroid = read_matroid(args.matroid)
    partials = chow.partial_monomials(matroid, seed=config.default_seed())
    anchor = matroid.labels[0]
    failures = [
        f"{partial} ({anchor}, {label})"
        for partial in partials
        for label in matroid.labels[1:]
        if not chow.relation_annihilation_check(matroid, partial, anchor, label)
    ]
    checked = len(partials) * (matroid.size - 1)
    return CommandResult(
        {"checked": checked, "failures": failures},
        f"{checked - len(failures)} of {checked} relation checks pass",
        EXIT_VERIFICATION_FAILED if failures else EXIT_OK,
    )


def handle_chow_presentation(args: argparse.Namespace) -> CommandResult:
    presentation = chow.chow_presentation(read_fan(args.fan))
    return CommandResult(
        presentation.to_dict(),
        f"{len(presentation.generators)} generators, "
        f"{len(presentation.non_faces)} minimal non-faces, "
        f"{len(presentation.relations)} linear relations",
    )


def handle_chow_coarse3(args: argparse.Namespace) -> CommandResult:
    value = chow.coarse_rank3_degree(
        read_matroid(args.matroid), split_labels(args.first), split_labels(args.second)
    )
    return CommandResult({"degree": value}, f"deg = {value}")


def _weights_table(weight: csm.MinkowskiWeight) -> str:
    return "\n".join(
        f"{sorted(cone)}\t{value}"
        for cone, value in sorted(
            weight.weights.items(), key=lambda item: sorted(item[0])
        )
    )


def handle_csm_weights(args: argparse.Namespace) -> CommandResult:
    weight = csm.csm_weights(read_matroid(args.matroid), args.k)
    return CommandResult(weight.to_dict(), _weights_table(weight))


def handle_csm_balancing(args: argparse.Namespace) -> CommandResult:
    report = csm.balancing_check(csm.csm_weights(read_matroid(args.matroid), args.k))
    return CommandResult(
        {
            "ok": report.ok,
            "checked": report.checked,
            "failures": [sorted(face) for face in report.failures],
        },
        f"{report.checked - len(report.failures)} of {report.checked} faces balanced",
        EXIT_OK if report.ok else EXIT_VERIFICATION_FAILED,
    )


def handle_csm_cross_check(args: argparse.Namespace) -> CommandResult:
    matroid = read_matroid(args.matroid)
    flag_route = csm.csm_weights(matroid, args.k)
    support_route = csm.csm_weights_from_support(matroid, args.k, flag_route.fan)
    mismatches = [
        sorted(cone)
        for cone in flag_route.weights
        if flag_route[cone] != support_route[cone]
    ]
    return CommandResult(
        {"ok": not mismatches, "mismatches": mismatches},
        f"{len(flag_route.weights) - len(mismatches)} of {len(flag_route.weights)} "
        "cones agree",
        EXIT_VERIFICATION_FAILED if mismatches else EXIT_OK,
    )


def handle_map_matroid_iso(args: argparse.Namespace) -> CommandResult:
    bijection = dict(pair.split("=") for pair in split_labels(args.bijection))
    lattice_map = maps.from_matroid_iso(
        bijection, read_matroid(args.source), read_matroid(args.target)
    )
    return CommandResult(lattice_map.to_dict(), "label map preserves rank")


def handle_map_cremona_criterion(args: argparse.Namespace) -> CommandResult:
    matroid = read_matroid(args.matroid)
    criterion = maps.cremona_criterion(matroid, split_labels(args.basis))
    partition = [sorted(block) for block in criterion.partition]
    table = ("holds" if criterion.holds else f"fails: {criterion.witness}") + "\n" + (
        "\n".join("{" + ",".join(block) + "}" for block in partition)
    )
    return CommandResult(
        {"holds": criterion.holds, "partition": partition, "witness": criterion.witness},
        table,
        EXIT_OK if criterion.holds else EXIT_VERIFICATION_FAILED,
    )


def handle_map_cremona(args: argparse.Namespace) -> CommandResult:
    matroid = read_matroid(args.matroid)
    lattice_map = maps.cremona_map(matroid, split_labels(args.basis))
    return CommandResult(
        lattice_map.to_dict(),
        "\n".join(" ".join(str(v) for v in row) for row in lattice_map.matrix),
    )


def handle_map_parallel_split(args: argparse.Namespace) -> CommandResult:
    matroid = read_matroid(args.matroid)
    split = maps.parallel_split_map(matroid)
    report = maps.verify_split_support(
        matroid, max(args.samples, maps.MIN_SPLIT_SAMPLES), config.default_seed()
    )
    payload = {
        "first": split.first.to_dict(),
        "second": split.second.to_dict(),
        "ok": report.ok,
        "forward": [report.forward_on, report.forward_off],
        "backward": [report.backward_on, report.backward_off],
        "failures": list(report.failures),
    }
    return CommandResult(
        payload,
        f"forward on/off {report.forward_on}/{report.forward_off}, "
        f"backward on/off {report.backward_on}/{report.backward_off}, "
        f"{len(report.failures)} failures",
        EXIT_OK if report.ok else EXIT_VERIFICATION_FAILED,
    )


def handle_map_verify_iso(args: argparse.Namespace) -> CommandResult:
    lattice_map = LatticeMap.from_dict(read_json(args.map))
    report = maps.verify_fan_isomorphism(
        lattice_map, read_fan(args.source_fan), read_fan(args.target_fan)
    )
    return CommandResult(
        {
            "ok": report.ok,
            "ray_images": list(report.ray_images or ()),
            "failures": list(report.failures),
        },
        "isomorphism verified" if report.ok else "\n".join(report.failures),
        EXIT_OK if report.ok else EXIT_VERIFICATION_FAILED,
    )


def handle_map_group_order(args: argparse.Namespace) -> CommandResult:
    matroid = read_matroid(args.matroid)
    fan = build_fan(matroid, args.structure)
    generators = [
        maps.ray_permutation(maps.from_matroid_iso(automorphism, matroid, matroid), fan)
        for automorphism in matroid_automorphisms(matroid)
    ]
    for basis in args.cremona_basis or []:
        cremona = maps.cremona_map(matroid, split_labels(basis))
        generators.append(maps.ray_permutation(cremona, fan))
    order = maps.group_closure_order(generators)
    return CommandResult(
        {"generators": len(generators), "order": order}, f"group order {order}"
    )


def build_parser() -> argparse.ArgumentParser:  # noqa: PLR0915
    parser = Parser(prog="bergmankit", description=__doc__)
    parser.add_argument("--format", choices=("table", "structured"), default="table")
    parser.add_argument("--output", help="write the result to this path")
    parser.add_argument("--verbose", action="store_true")
    groups = parser.add_subparsers(dest="group", required=True)

    def command(
        group: Any, name: str, handler: Handler  # noqa: ANN401
    ) -> argparse.ArgumentParser:
        subparser: argparse.ArgumentParser = group.add_parser(name)
        subparser.set_defaults(handler=handler)
        return subparser

    def with_matroid(subparser: argparse.ArgumentParser) -> argparse.ArgumentParser:
        subparser.add_argument("--matroid", required=True)
        return subparser

    matroid_group = groups.add_parser("matroid").add_subparsers(
        dest="action", required=True
    )
    build = command(matroid_group, "build", handle_matroid_build)
    build.add_argument("--kind", required=True, choices=tuple(REQUIRED_BUILD_OPTIONS))
    build.add_argument("--rank", type=int)
    build.add_argument("--size", type=int)
    build.add_argument("--vertices", type=int)
    build.add_argument("--edges", help="edges as 1-2,1-3,...")
    build.add_argument("--simple", action="store_true")
    build.add_argument("--prime", type=int)
    build.add_argument("--columns", help="columns as 1,0,0;0,1,0;...")
    build.add_argument("--dimension", type=int)
    build.add_argument("--cyclic-order", type=int, default=1)
    build.add_argument("--first")
    build.add_argument("--second")
    build.add_argument("--first-point")
    build.add_argument("--second-point")
    with_matroid(command(matroid_group, "describe", handle_matroid_describe))
    with_matroid(command(matroid_group, "simplify", handle_matroid_simplify))
    minor = with_matroid(command(matroid_group, "minor", handle_matroid_minor))
    minor.add_argument("--delete", default="")
    minor.add_argument("--contract", default="")

    fan_group = groups.add_parser("fan").add_subparsers(dest="action", required=True)
    fan_build = with_matroid(command(fan_group, "build", handle_fan_build))
    fan_build.add_argument(
        "--structure", choices=(fans.FINE, fans.NESTED, fans.COARSE), default=fans.FINE
    )
    command(fan_group, "rays", handle_fan_rays).add_argument("--fan", required=True)
    cones = command(fan_group, "cones", handle_fan_cones)
    cones.add_argument("--fan", required=True)
    cones.add_argument("--dim", type=int)
    member = with_matroid(command(fan_group, "member", handle_fan_member))
    member.add_argument("--point", required=True, help="coordinates as 1,0,0")
    star = with_matroid(command(fan_group, "star", handle_fan_star))
    star.add_argument("--flag", required=True, help="flats as 12|12,13,23")
    star.add_argument("--samples", type=int)

    invariants_group = groups.add_parser("invariants").add_subparsers(
        dest="action", required=True
    )
    with_matroid(command(invariants_group, "charpoly", handle_invariants_charpoly))
    with_matroid(command(invariants_group, "beta", handle_invariants_beta))
    with_matroid(command(invariants_group, "mu", handle_invariants_mu)).add_argument(
        "--k", type=int
    )
    osdim = with_matroid(command(invariants_group, "osdim", handle_invariants_osdim))
    osdim.add_argument("--p", type=int, required=True)
    with_matroid(command(invariants_group, "verify-os", handle_invariants_verify_os))

    chow_group = groups.add_parser("chow").add_subparsers(dest="action", required=True)
    with_matroid(command(chow_group, "degree", handle_chow_degree)).add_argument(
        "--monomial", required=True, help="factors as 12^2|12,13,23"
    )
    with_matroid(command(chow_group, "relations", handle_chow_relations))
    command(chow_group, "presentation", handle_chow_presentation).add_argument(
        "--fan", required=True
    )
    coarse3 = with_matroid(command(chow_group, "coarse3", handle_chow_coarse3))
    coarse3.add_argument("--first", required=True)
    coarse3.add_argument("--second", required=True)

    csm_group = groups.add_parser("csm").add_subparsers(dest="action", required=True)
    for name, handler in (
        ("weights", handle_csm_weights),
        ("balancing", handle_csm_balancing),
        ("cross-check", handle_csm_cross_check),
    ):
        with_matroid(command(csm_group, name, handler)).add_argument(
            "--k", type=int, required=True
        )

    map_group = groups.add_parser("map").add_subparsers(dest="action", required=True)
    iso = command(map_group, "matroid-iso", handle_map_matroid_iso)
    iso.add_argument("--source", required=True)
    iso.add_argument("--target", required=True)
    iso.add_argument("--bijection", required=True, help="pairs as 12=13,13=12,...")
    for name, handler in (
        ("cremona-criterion", handle_map_cremona_criterion),
        ("cremona", handle_map_cremona),
    ):
        with_matroid(command(map_group, name, handler)).add_argument(
            "--basis", required=True
        )
    split = with_matroid(command(map_group, "parallel-split", handle_map_parallel_split))
    split.add_argument("--samples", type=int, default=maps.MIN_SPLIT_SAMPLES)
    verify = command(map_group, "verify-iso", handle_map_verify_iso)
    verify.add_argument("--map", required=True)
    verify.add_argument("--source-fan", required=True)
    verify.add_argument("--target-fan", required=True)
    order = with_matroid(command(map_group, "group-order", handle_map_group_order))
    order.add_argument(
        "--structure", choices=(fans.FINE, fans.NESTED, fans.COARSE), default=fans.NESTED
    )
    order.add_argument("--cremona-basis", action="append")
    return parser


def render(result: CommandResult, output_format: str) -> str:
    if output_format == "structured":
        return json.dumps(result.payload, indent=2, sort_keys=True) + "\n"
    return result.table + "\n"


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as error:
        sys.stderr.write(f"bergmankit: {error}\n")
        return EXIT_INPUT_ERROR
    config.configure_logging(verbose=args.verbose)
    config.configure_sentry()
    try:
        result = args.handler(args)
    except CremonaCriterionError as error:
        logger.warning("%s", error)
        return EXIT_VERIFICATION_FAILED
    except json.JSONDecodeError as error:
        logger.error("Malformed JSON input: %s", error)  # noqa: TRY400
        return EXIT_INPUT_ERROR
    except INPUT_ERRORS as error:
        logger.error("%s: %s", type(error).__name__, error)  # noqa: TRY400
        return EXIT_INPUT_ERROR
    rendered = render(result, args.format)
    if args.output:
        Path(args.output).write_text(rendered, encoding="utf-8")
    else:
        sys.stdout.write(rendered)
    return result.exit_code


def main() -> None:
    sys.exit(run())
