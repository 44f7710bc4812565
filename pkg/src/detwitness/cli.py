"""Command-line interface.

Exit codes: 0 separable / success, 3 entangled, 2 invalid input, 1 failed verification.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, dataclass

from . import __version__, circuit, criteria, measures, states, verify, witness
from .statefile import read_state
from .states import StateValidationError

EXIT_SEPARABLE, EXIT_FAILURE, EXIT_INVALID, EXIT_ENTANGLED = 0, 1, 2, 3
EXIT_SUCCESS = EXIT_SEPARABLE

FIG1_HEADER = ["negativity", "concurrence", "pi2", "bound_eq6_N", "bound_half_Nplus1"]


@dataclass
class RunReport:
    input_digest: str
    verdict: criteria.Verdict
    measures: measures.MeasureReport | None
    witness_value: float | None
    circuit_sigma_z: float | None
    seed: int | None
    tool_version: str = __version__
    routes_agree: bool = True

    def as_dict(self) -> dict:
        d = asdict(self)
        d["verdict"]["decision"] = self.verdict.decision.value
        d["verdict"]["criterion"] = self.verdict.criterion.value
        return d


def build_report(rho: states.DensityMatrix, digest: str, seed: int | None = None) -> RunReport:
    if rho.dims == (2, 2):
        verdict = criteria.det_ppt_test(rho)
        w_value = witness.witness_expectation(witness.build_w4(), rho)
        z = circuit.run_exact(rho)
        circuit_verdict = circuit.verdict_from_sigma_z(z)
        # the boundary band may legitimately split the routes
        agree = (abs(verdict.det_value) <= criteria.DECISION_TOL
                 or (circuit_verdict.decision is verdict.decision
                     and criteria.decide(w_value) is verdict.decision))
        return RunReport(digest, verdict, measures.bound_report(rho), w_value, z, seed, routes_agree=agree)
    if len(rho.dims) == 2 and rho.dims[0] == 2:
        return RunReport(digest, criteria.reduction_det_test(rho), None, None, None, seed)
    raise StateValidationError([f"dims: verdict supports 2x2 and 2xd states, got {list(rho.dims)}"])


def _fmt(x) -> str:
    return repr(float(x))


def _report_csv(report: RunReport) -> str:
    flat = {
        "input_digest": report.input_digest,
        "decision": report.verdict.decision.value,
        "criterion": report.verdict.criterion.value,
        "det_value": _fmt(report.verdict.det_value),
        "witness_eigenvalue": _fmt(report.verdict.witness_eigenvalue),
    }
    if report.measures is not None:
        flat.update({k: _fmt(v) for k, v in report.measures.as_dict().items()})
    for key in ("witness_value", "circuit_sigma_z"):
        value = getattr(report, key)
        flat[key] = "" if value is None else _fmt(value)
    flat["routes_agree"] = str(report.routes_agree).lower()
    flat["tool_version"] = report.tool_version
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(flat.keys())
    writer.writerow(flat.values())
    return buf.getvalue()


def _report_text(report: RunReport) -> str:
    v = report.verdict
    lines = [
        f"decision:        {v.decision.value} ({v.criterion.value})",
        f"det value:       {_fmt(v.det_value)}",
        f"min eigenvalue:  {_fmt(v.witness_eigenvalue)}",
    ]
    if report.measures is not None:
        for k, val in report.measures.as_dict().items():
            lines.append(f"{k + ':':<17}{_fmt(val)}")
        lines.append(f"witness <W4>:    {_fmt(report.witness_value)}")
        lines.append(f"circuit <sz>:    {_fmt(report.circuit_sigma_z)}")
        lines.append(f"routes agree:    {report.routes_agree}")
    lines.append(f"input sha256:    {report.input_digest}")
    return "\n".join(lines) + "\n"


def _load(path: str) -> tuple[states.DensityMatrix, str]:
    try:
        return read_state(path)
    except OSError as exc:
        raise StateValidationError([f"file: {exc}"]) from None


def cmd_verdict(args) -> int:
    try:
        rho, digest = _load(args.state)
        report = build_report(rho, digest)
    except StateValidationError as exc:
        for f in exc.failures:
            print(f"invalid state: {f}", file=sys.stderr)
        return EXIT_INVALID
    if args.format == "json":
        sys.stdout.write(json.dumps(report.as_dict(), indent=2) + "\n")
    elif args.format == "csv":
        sys.stdout.write(_report_csv(report))
    else:
        sys.stdout.write(_report_text(report))
    return EXIT_ENTANGLED if report.verdict.entangled else EXIT_SEPARABLE


def fig1_rows(samples: int, seed: int, append_bell: bool = False) -> list[list[float]]:
    rng = states.make_rng(seed)
    rows = []
    pool = list(verify.sample_states(rng, samples))
    if append_bell:
        pool.append(states.bell_state())
    for rho in pool:
        r = measures.bound_report(rho)
        rows.append([r.negativity, r.concurrence, r.pi2, r.lower_bound_eq6, r.upper_bound_fig1])
    return rows


def write_fig1(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FIG1_HEADER)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def cmd_fig1(args) -> int:
    if args.samples < 1:
        print("--samples must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    rows = fig1_rows(args.samples, args.seed, args.append_bell)
    try:
        write_fig1(args.out, rows)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    worst = min(min(c - n, p - c, b6 - p, bh - p) for n, c, p, b6, bh in rows)
    print(f"wrote {len(rows)} rows to {args.out}; minimum bound-chain slack {worst:.3e}")
    return EXIT_SUCCESS if worst >= -1e-10 else EXIT_FAILURE



def cmd_verify(args) -> int:
    results = verify.run_suite(args.suite, args.samples, args.seed)
    for r in results:
        print(r.line())
        for d in r.details:
            print(f"    {d}")
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed")
    return EXIT_FAILURE if failed else EXIT_SUCCESS


def cmd_circuit(args) -> int:
    try:
        rho, _ = _load(args.state)
    except StateValidationError as exc:
        for f in exc.failures:
            print(f"invalid state: {f}", file=sys.stderr)
        return EXIT_INVALID
    if rho.dims != (2, 2):
        print("invalid state: dims: the network needs a two-qubit state", file=sys.stderr)
        return EXIT_INVALID
    exact = circuit.run_exact(rho)
    print(f"exact <sigma_z>:  {_fmt(exact)}")
    print(f"threshold:        {_fmt(circuit.THRESHOLD)}")
    if args.shots:
        if args.seed is None:
            print("--seed is required with --shots", file=sys.stderr)
            return EXIT_INVALID
        res = circuit.run_shots(rho, shots=args.shots, rng=states.make_rng(args.seed), exact=exact)
        v = circuit.verdict_from_circuit(rho, shots=args.shots, rng=states.make_rng(args.seed))
        print(f"shot estimate:    {_fmt(res.estimate)} +- {_fmt(res.stderr)} ({args.shots} shots)")
        print(f"margin:           {v.margin:.3f} stderr below threshold")
        if args.transcript:
            circuit.write_shot_csv(args.transcript, res.outcomes)
    else:
        v = circuit.verdict_from_sigma_z(exact)
    print(f"decision:         {v.decision.value}")
    return EXIT_ENTANGLED if v.entangled else EXIT_SEPARABLE


def cmd_dump_w4(args) -> int:
    witness.dump_w4(witness.build_w4(), args.out)
    print(f"wrote W4 ({witness.W4_DIM}x{witness.W4_DIM}) to {args.out}")
    return EXIT_SUCCESS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="detwitness", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verdict", help="classify a state file")
    s.add_argument("state")
    fmt = s.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    s.set_defaults(func=cmd_verdict, format="text")

    s = sub.add_parser("fig1", help="emit the pi2 vs N/C scatter with bound curves as CSV")
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--append-bell", action="store_true", help="add the Bell state as a final row")
    s.set_defaults(func=cmd_fig1)

    s = sub.add_parser("verify", help="run Monte-Carlo verification suites")
    s.add_argument("--suite", default="all", choices=["all", *verify.SUITES])
    s.add_argument("--samples", type=int, default=None)
    s.add_argument("--seed", type=int, required=True)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("circuit", help="simulate the control-qubit network on a state file")
    s.add_argument("--state", required=True)
    s.add_argument("--shots", type=int, default=0, help="0 = exact mode only")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--transcript", help="write the shot outcomes to this CSV file")
    s.set_defaults(func=cmd_circuit)

    s = sub.add_parser("dump-w4", help="write the witness operator in binary form")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_dump_w4)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
