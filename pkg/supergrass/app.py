"""
Command-line front end: every computation as a subcommand, rendered as an
aligned table by default or as versioned JSON with --json.

Exit codes: 0 success, 2 invalid input, 3 failed verification, 4 resource
limit, 1 anything unexpected.
"""

import argparse
import logging
import sys
from typing import Callable, Dict, Optional, Sequence, TextIO, Tuple

from .services.export_service import ExportService
from .services.grassmann_service import GrassmannService, GrassSpec
from .services.koszul_service import KoszulService, OracleJob
from .services.lascoux_service import DetVarSpec, LascouxService
from .services.pair_service import MatrixPair, PairService, parse_matrix, reduced_charpoly
from .services.partition_service import Partition
from .services.polynomial_service import parse_univariate
from .services.ring_service import RingService, discriminant, sylvester
from .services.supergrass_service import SuperGrassSpec, SupergrassService, super_euler
from .utils.config import get_settings
from .utils.errors import InvalidInputError, SupergrassError, VerificationError

logger = logging.getLogger(__name__)

export_service = ExportService()

# (payload for --json, text for the default table output)
Result = Tuple[Dict, str]


def parse_partition(text: str) -> Partition:
    """'2,1' -> (2,1); an empty string is the empty partition"""
    text = (text or "").strip().strip("()")
    if not text:
        return Partition()
    try:
        return Partition(tuple(int(x) for x in text.split(",") if x.strip()))
    except ValueError:
        raise InvalidInputError(f"Cannot parse partition {text!r}")


def _kv_table(payload: Dict) -> str:
    rows = [(key, value) for key, value in payload.items()]
    return export_service.to_table(rows, ["field", "value"])


def cmd_betti(args) -> Result:
    spec = DetVarSpec(args.n, args.m, args.t)
    table = LascouxService().table(spec)
    headers, grid = table.grid()
    entries = [
        (e.p, e.d, e.rep.P, e.rep.Q, e.rep.dim, e.b, e.alpha, e.beta) for e in table.entries
    ]
    text = "\n\n".join([
        export_service.to_table(grid, headers),
        export_service.to_table(entries, ["p", "d", "P", "Q", "dim", "b", "alpha", "beta"]),
    ])
    return table.to_dict(), text


def cmd_strand(args) -> Result:
    spec = DetVarSpec(args.n, args.m, args.t)
    report = LascouxService().strand(spec, args.k)
    rows = [(t["p"], Partition(tuple(t["P"])), Partition(tuple(t["Q"])), t["dim"]) for t in report["terms"]]
    text = export_service.to_table(rows, ["p", "P", "Q", "dim"]) + f"\n\ntotal dim {report['dim']}"
    return report, text


def cmd_supercoh(args) -> Result:
    spec = SuperGrassSpec(args.n, args.m, args.r, args.s)
    report = SupergrassService().report(spec)
    rows = [(g.i, g.even_dim, g.odd_dim, g.dim, len(g.terms)) for g in report.groups]
    summary = [
        f"{spec}: delta={report.delta.value}, A = H*(Gr_{report.grass.s}(C^{report.grass.N})), case {report.to_dict()['case']}",
        f"euler characteristic {report.euler.computed} (closed form {report.euler.formula})",
    ]
    lines = [export_service.to_table(rows, ["i", "even", "odd", "dim", "terms"]), "\n".join(summary)]
    if args.terms:
        terms = [
            (g.i, t.a_degree, t.strand, t.p, t.P, t.Q, t.dim, "odd" if t.parity else "even")
            for g in report.groups
            for t in g.terms
        ]
        lines.append(export_service.to_table(terms, ["i", "A-deg", "strand", "p", "P", "Q", "dim", "parity"]))
    return report.to_dict(), "\n\n".join(lines)


def cmd_euler(args) -> Result:
    spec = SuperGrassSpec(args.n, args.m, args.r, args.s)
    check = super_euler(spec)
    payload = {"spec": spec.to_dict(), **check.to_dict()}
    return payload, _kv_table({"spec": str(spec), "formula": check.formula, "computed": check.computed})


def cmd_poincare(args) -> Result:
    spec = GrassSpec(args.s, args.N)
    service = GrassmannService()
    payload = service.poincare(spec)
    rows = [(d, dim, " ".join(str(Partition(tuple(p))) for p in payload["basis"][d]))
            for d, dim in payload["dims"].items()]
    text = export_service.to_table(rows, ["degree", "dim", "basis"]) + f"\n\ntotal {payload['total']}"
    if args.cup:
        left, right = (parse_partition(x) for x in args.cup)
        product = service.multiply(spec, left, right)
        payload["product"] = {"x": left.to_list(), "y": right.to_list(), "terms": product.to_list()}
        text += f"\ns{left} * s{right} = {product}"
    return payload, text


def cmd_splitring(args) -> Result:
    report = RingService().split_report(parse_univariate(args.f))
    return report, _kv_table(report)


def cmd_factring(args) -> Result:
    report = RingService().fact_report(parse_univariate(args.f), args.p)
    return report, _kv_table(report)


def cmd_sylvester(args) -> Result:
    f = parse_univariate(args.f)
    g = parse_univariate(args.g, monic=False)
    syl = sylvester(f, g, args.deg_f, args.deg_g)
    payload = syl.to_dict()
    text = export_service.to_table(payload["rows"]) + f"\n\ndet = {payload['det']}"
    if syl.nullity is not None:
        text += f"\nnullity = {syl.nullity}"
    return payload, text


def cmd_discriminant(args) -> Result:
    f = parse_univariate(args.f)
    disc = discriminant(f)
    payload = {"f": str(f), "discriminant": str(disc)}
    return payload, _kv_table(payload)


def cmd_classify(args) -> Result:
    pair = MatrixPair(parse_matrix(args.f, args.m, args.n), parse_matrix(args.g, args.n, args.m))
    report = PairService().classify(pair)
    if args.delta is not None:
        report["reduced_charpoly"] = str(reduced_charpoly(pair, args.delta))
    rows = [
        (b["type"], b["k"], "" if b["type"] != "A" else (b["poly"] if b["poly"] == "inf" else ",".join(map(str, b["poly"]))))
        for b in report["blocks"]
    ]
    text = export_service.to_table(rows, ["type", "k", "poly"]) + f"\n\ncharpoly(fg) = {report['charpoly']}"
    if "reduced_charpoly" in report:
        text += f"\nreduced charpoly = {report['reduced_charpoly']}"
    return report, text


def cmd_oracle(args) -> Result:
    spec = DetVarSpec(args.n, args.m, args.t)
    tor = KoszulService().tor(OracleJob(spec, args.dmax, args.pmax, args.characters, args.reverse))
    rows = [(p, d, v) for (p, d), v in tor.nonzero().items()]
    text = export_service.to_table(rows, ["p", "d", "dim"])
    text += "\n\nquotient dims " + " ".join(str(tor.quotient_dims.get(d, 0)) for d in range(args.dmax + 1))
    return tor.to_dict(), text


def cmd_compare(args) -> Result:
    spec = DetVarSpec(args.n, args.m, args.t)
    report = KoszulService().compare(spec, args.dmax, args.characters)
    rows = [(r["p"], r["d"], r["lascoux"], r["oracle"], "ok" if r["match"] else "MISMATCH") for r in report.rows]
    verdict = "all bidegrees match" if report.all_match else f"{len(report.mismatches)} bidegrees differ"
    if report.character_mismatches:
        verdict += f"; characters differ at {report.character_mismatches}"
    text = export_service.to_table(rows, ["p", "d", "lascoux", "oracle", ""]) + f"\n\n{verdict}"
    if not report.all_match:
        raise _ReportedFailure(report.to_dict(), text)
    return report.to_dict(), text


def cmd_selfcheck(args) -> Result:
    settings = get_settings()
    rings = RingService()
    checks = {
        "classification": PairService().roundtrips(settings.seed, settings.trials),
        "sylvester": rings.gcd_trials(settings.seed, settings.trials),
        "discriminant": rings.discriminant_trials(settings.seed, settings.trials),
    }
    payload = {"seed": settings.seed, "trials": settings.trials, "checks": checks}
    rows = [(name, report["trials"] - len(report["failures"]), report["trials"]) for name, report in checks.items()]
    text = f"seed {settings.seed}\n\n" + export_service.to_table(rows, ["check", "passed", "trials"])
    if any(report["failures"] for report in checks.values()):
        raise _ReportedFailure(payload, text)
    return payload, text


class _ReportedFailure(VerificationError):
    """A verification failure whose report is still printed"""

    def __init__(self, payload: Dict, text: str):
        super().__init__("verification failed")
        self.payload = payload
        self.text = text


COMMANDS: Dict[str, Callable] = {
    "betti": cmd_betti,
    "strand": cmd_strand,
    "supercoh": cmd_supercoh,
    "euler": cmd_euler,
    "poincare": cmd_poincare,
    "splitring": cmd_splitring,
    "factring": cmd_factring,
    "sylvester": cmd_sylvester,
    "discriminant": cmd_discriminant,
    "classify": cmd_classify,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
    "selfcheck": cmd_selfcheck,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="write versioned JSON instead of a table")
    common.add_argument("--seed", type=int, help="seed for randomized checks")
    common.add_argument("--trials", type=int, help="number of randomized trials")
    common.add_argument("--parallel", action="store_true", help="enable the process-pool paths")
    common.add_argument("--max-cells", type=int, dest="max_cells", help="largest matrix any rank step may build")

    parser = argparse.ArgumentParser(
        prog="supergrass",
        description=__doc__.strip().splitlines()[0],
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Environment Variables:
  SUPERGRASS_MAX_CELLS          Largest matrix a rank step may build (default: 4000000)
  SUPERGRASS_ORACLE_MAX_VARS    n*m cap for the Koszul oracle (default: 12)
  SUPERGRASS_ORACLE_MAX_DEGREE  Degree cap for the Koszul oracle (default: 10)
  SUPERGRASS_SEED               Seed for randomized checks (default: 0)
  SUPERGRASS_LOG_LEVEL          Log level, logs go to stderr (default: WARNING)

Example:
  python run.py betti --n 3 --m 2 --t 1
  python run.py compare --n 3 --m 2 --t 1 --dmax 6 --parallel
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    def det_var(p: argparse.ArgumentParser) -> None:
        p.add_argument("--n", type=int, required=True, help="dim V0")
        p.add_argument("--m", type=int, required=True, help="dim V1")
        p.add_argument("--t", type=int, required=True, help="rank cutoff")

    def super_grass(p: argparse.ArgumentParser) -> None:
        for name in ("n", "m", "r", "s"):
            p.add_argument(f"--{name}", type=int, required=True)

    det_var(add("betti", "Betti table of the rank <= t maps C^n -> C^m"))
    p = add("strand", "one linear strand of that resolution")
    det_var(p)
    p.add_argument("--k", type=int, required=True)

    p = add("supercoh", "cohomology of the structure sheaf of Gr_{r|s}(C^{n|m})")
    super_grass(p)
    p.add_argument("--terms", action="store_true", help="also list every summand")
    super_grass(add("euler", "super Euler characteristic, closed form against the computed sum"))

    p = add("poincare", "Schubert basis and graded dims of H*(Gr_s(C^N))")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--cup", nargs=2, metavar="PARTITION", help="multiply two Schubert classes, e.g. --cup 1 2,1")

    p = add("splitring", "splitting ring of a monic polynomial")
    p.add_argument("--f", required=True, help='e.g. "u^3" or "u^2 + a1*u + a2"')
    p = add("factring", "factorization ring Fact^{p,q}(f)")
    p.add_argument("--f", required=True)
    p.add_argument("--p", type=int, required=True)

    p = add("sylvester", "Sylvester matrix, determinant and nullity")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--deg-f", type=int, dest="deg_f", help="declared degree of f")
    p.add_argument("--deg-g", type=int, dest="deg_g", help="declared degree of g")
    p = add("discriminant", "discriminant of a monic polynomial")
    p.add_argument("--f", required=True)

    p = add("classify", "indecomposable decomposition of a pair f: Q^n -> Q^m, g: Q^m -> Q^n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--f", default="", help='m x n matrix, rows separated by ";", e.g. "1,0;0,1"')
    p.add_argument("--g", default="", help="n x m matrix")
    p.add_argument("--delta", type=int, help="also report chi(u) / u^delta")

    p = add("oracle", "Koszul-homology Tor dimensions of the determinantal ideal")
    det_var(p)
    p.add_argument("--dmax", type=int, required=True)
    p.add_argument("--pmax", type=int)
    p.add_argument("--characters", action="store_true", help="keep torus characters")
    p.add_argument("--reverse", action="store_true", help="reverse the monomial enumeration order")

    p = add("compare", "Betti table against the Koszul oracle")
    det_var(p)
    p.add_argument("--dmax", type=int, required=True)
    p.add_argument("--characters", action="store_true")

    add("selfcheck", "seeded randomized property checks")
    return parser


def _emit(out: TextIO, args, payload: Dict, text: str) -> None:
    if args.json:
        out.write(export_service.to_json(args.command, payload) + "\n")
    else:
        out.write(text.rstrip() + "\n")


def dispatch(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2

    get_settings().override(
        seed=args.seed,
        trials=args.trials,
        parallel=True if args.parallel else None,
        max_cells=args.max_cells,
    )
    try:
        payload, text = COMMANDS[args.command](args)
        _emit(out, args, payload, text)
        return 0
    except _ReportedFailure as e:
        _emit(out, args, e.payload, e.text)
        return e.exit_code
    except SupergrassError as e:
        logger.error(f"{args.command} failed: {e}")
        sys.stderr.write(f"error: {e}\n")
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected failure in {args.command}: {e}")
        sys.stderr.write(f"unexpected error: {e}\n")
        return 1
