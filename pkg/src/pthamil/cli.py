"""Command-line front end.

Subcommands: ``analyze``, ``batch``, ``two-level``, ``fock-demo``, ``evolve``.
Exit codes: 0 success, 2 parse/configuration error, 3 no antilinear symmetry,
4 exceptional point, 1 anything else. Floats print to 12 significant digits,
residuals in scientific notation. ``PTHAMIL_TOL`` overrides the default
tolerance; ``--tol`` overrides both.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import PTHamilError
from .fockdemo import divergence_witness, expand_position_state, oscillator_contrast
from .matio import format_complex_cell
from .pipeline import (
    AnalysisConfig,
    DEFAULT_TIMES,
    EXIT_OK,
    EXIT_PARSE,
    AnalysisReport,
    emit_report,
    error_entry,
    run_analyze,
    run_batch,
)
from .twolevel import TwoLevelModel, closed_forms, compare_with_pipeline


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _fmt_res(x: float) -> str:
    return f"{x:.3e}"


def _fmt_matrix(d: dict, indent: str = "  ") -> str:
    m = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
    return "\n".join(
        indent + "  ".join(f"{format_complex_cell(z):>22}" for z in row) for row in m
    )


def _print_section(title: str) -> None:
    print(f"\n== {title} ==")


def _render_text(report: AnalysisReport) -> None:
    d = report.to_dict()
    _print_section("spectrum")
    spectrum = d["spectrum"]
    print(f"  kind: {spectrum['kind']}")
    if spectrum["pairs"]:
        print(f"  conjugate pairs (indices): {spectrum['pairs']}")
    if spectrum["real_indices"]:
        print(f"  real eigenvalue indices: {spectrum['real_indices']}")
    print(f"  eigenvector condition number: {_fmt_res(spectrum['condition'])}"
          f"  (exceptional beyond {_fmt_res(spectrum['exceptional_threshold'])})")
    _print_section("eigenvalues")
    for re, im in d["eigen"]["values"]:
        print(f"  {format_complex_cell(complex(re, im))}")
    _print_section("metric V")
    print(_fmt_matrix(d["V"]))
    print(f"  hermitian: {d['V']['hermitian']}  positive: {d['V']['positive']}"
          f"  intertwining residual: {_fmt_res(d['V']['residual'])}")
    _print_section("gram matrices")
    for name in ("dirac", "v", "p", "pt"):
        block = d["gram"][name]
        if block is None:
            continue
        print(f"  {name}:")
        print(_fmt_matrix(block, indent="    "))
    for key in ("pt", "pv", "c"):
        section = d[key]
        _print_section(key)
        if "skipped" in section:
            print(f"  skipped: {section['skipped']}")
        for k, v in section.items():
            if k in ("matrix", "gram"):
                print(f"  {k}:")
                print(_fmt_matrix(v, indent="    "))
            elif k != "skipped":
                print(f"  {k}: {v}")
    _print_section("diagnostic")
    diag = d["diagnostic"]
    print(f"  {diag if isinstance(diag, str) else 'skipped: ' + diag['skipped']}")
    _print_section("time independence")
    ti = d["time_independence"]
    print(f"  times: {[_fmt(t) for t in ti['times']]}")
    print(f"  max drift: {_fmt_res(ti['max_drift'])}")
    if d["selection_rule_violations"]:
        print(f"  selection-rule violations: {d['selection_rule_violations']}")
    _print_section("flags")
    for name, flag in sorted(d["flags"].items()):
        status = "pass" if flag["passed"] else "FAIL"
        print(f"  {name}: {status} (residual {_fmt_res(flag['residual'])}"
              f" <= {_fmt_res(flag['threshold'])})")
    if d["notes"]:
        _print_section("notes")
        for note in d["notes"]:
            print(f"  - {note}")


def _render_csv(report: AnalysisReport) -> None:
    d = report.to_dict()
    print("section,key,value")
    print(f"spectrum,kind,{d['spectrum']['kind']}")
    for i, (re, im) in enumerate(d["eigen"]["values"]):
        print(f"eigen,value_{i},{format_complex_cell(complex(re, im))}")
    m = np.asarray(d["V"]["re"]) + 1j * np.asarray(d["V"]["im"])
    for i, row in enumerate(m):
        print(f"V,row_{i},\"{','.join(format_complex_cell(z) for z in row)}\"")
    print(f"time_independence,max_drift,{_fmt_res(d['time_independence']['max_drift'])}")
    for name, flag in sorted(d["flags"].items()):
        print(f"flags,{name},{'pass' if flag['passed'] else 'fail'}")


def _emit(report: AnalysisReport, output: str) -> None:
    if output == "json":
        print(emit_report(report))
    elif output == "csv":
        _render_csv(report)
    else:
        _render_text(report)


def _add_common(sub: argparse.ArgumentParser, with_input: bool = True) -> None:
    if with_input:
        group = sub.add_mutually_exclusive_group(required=True)
        group.add_argument("--file", help="Hamiltonian matrix file (JSON or CSV)")
        group.add_argument("--model", choices=("two-level", "fock-x"),
                           help="builtin model instead of a file")
        sub.add_argument("--alpha", type=float, help="two-level parameter alpha")
        sub.add_argument("--beta", type=float, help="two-level parameter beta")
        sub.add_argument("--nmax", type=int, help="fock-x truncation size")
        sub.add_argument("--p", dest="p_spec",
                         help="parity matrix: file, builtin (sigma1|sigma2|sigma3|identity|alternating), or 'none'")
        sub.add_argument("--t", dest="t_spec",
                         help="time reversal: file holding u of v->u*conj(v), or builtin (k|ki|kisigma1)")
        sub.add_argument("--c-signs", help="comma-separated +-1 weights for the C operator")
    sub.add_argument("--tol", type=float, help="tolerance override (default 1e-10 or PTHAMIL_TOL)")
    sub.add_argument("--format", dest="output", choices=("text", "json", "csv"), default="text")


def _config_from_args(args) -> AnalysisConfig:
    c_signs = None
    if getattr(args, "c_signs", None):
        c_signs = tuple(int(s) for s in args.c_signs.split(","))
    return AnalysisConfig(
        source_path=args.file,
        model=args.model,
        alpha=args.alpha,
        beta=args.beta,
        nmax=args.nmax,
        p_spec=args.p_spec,
        t_spec=args.t_spec,
        tol=args.tol,
        times=tuple(args.times) if getattr(args, "times", None) else DEFAULT_TIMES,
        c_signs=c_signs,
        output=args.output,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pthamil",
        description="Inner products and metric operators for Hamiltonians "
                    "with antilinear (PT-type) symmetry.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    analyze = subs.add_parser("analyze", help="full analysis of one Hamiltonian")
    _add_common(analyze)
    analyze.add_argument("--times", type=float, nargs="*",
                         help=f"evolution time samples (default {list(DEFAULT_TIMES)})")

    batch = subs.add_parser("batch", help="analyze many matrix files")
    batch.add_argument("paths", nargs="*", help="matrix files")
    batch.add_argument("--parallelism", type=int, default=1)
    batch.add_argument("--tol", type=float)
    batch.add_argument("--format", dest="output", choices=("text", "json"), default="json")

    two = subs.add_parser("two-level", help="closed forms and pipeline comparison")
    two.add_argument("--alpha", type=float, required=True)
    two.add_argument("--beta", type=float, required=True)
    two.add_argument("--tol", type=float)
    two.add_argument("--format", dest="output", choices=("text", "json"), default="text")

    fock = subs.add_parser("fock-demo", help="position-eigenstate coefficient table")
    fock.add_argument("--x", type=float, required=True)
    fock.add_argument("--nmax", type=int, default=2000)
    fock.add_argument("--csv", help="write the coefficient table to this CSV file")
    fock.add_argument("--format", dest="output", choices=("text", "json"), default="text")

    evolve = subs.add_parser("evolve", help="time-independence check of the V inner product")
    _add_common(evolve)
    evolve.add_argument("--times", type=float, nargs="*", required=True)
    return parser


def _cmd_analyze(args) -> int:
    report = run_analyze(_config_from_args(args))
    _emit(report, args.output)
    return EXIT_OK


def _cmd_batch(args) -> int:
    entries = run_batch(args.paths, parallelism=args.parallelism,
                        base_cfg=AnalysisConfig(source_path="-", tol=args.tol)
                        if args.tol else None)
    if args.output == "json":
        print(json.dumps(entries, indent=2, sort_keys=True))
    else:
        for entry in entries:
            status = "ok" if "report" in entry else f"error: {entry['error']['message']}"
            print(f"{entry['path']}: {status}")
    return EXIT_OK if all("report" in e for e in entries) else 1


def _cmd_two_level(args) -> int:
    model = TwoLevelModel(args.alpha, args.beta)
    cf = closed_forms(model)
    comparison = compare_with_pipeline(model, tol=args.tol or 1e-10)
    payload = {
        "alpha": model.alpha,
        "beta": model.beta,
        "phase": model.phase(),
        "theta": cf.theta,
        "energies": [cf.energies[0], cf.energies[1]],
        "dirac_overlap": cf.dirac_overlap,
        "S": {"re": cf.s.real.tolist(), "im": cf.s.imag.tolist()},
        "V": {"re": cf.v.real.tolist(), "im": cf.v.imag.tolist()},
        "u_plus": [[z.real, z.imag] for z in cf.u_plus],
        "u_minus": [[z.real, z.imag] for z in cf.u_minus],
        "pipeline_residuals": comparison.residuals,
        "pipeline_max_residual": comparison.max_residual,
    }
    if args.output == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
        return EXIT_OK
    print(f"two-level model: alpha={_fmt(model.alpha)} beta={_fmt(model.beta)}"
          f" ({model.phase()} phase)")
    print(f"  theta = {_fmt(cf.theta)}")
    print(f"  energies = {_fmt(cf.energies[0])}, {_fmt(cf.energies[1])}")
    print(f"  dirac overlap = {_fmt(cf.dirac_overlap)}")
    print("  V =")
    print(_fmt_matrix(payload["V"], indent="    "))
    print("  pipeline comparison residuals:")
    for name, value in sorted(comparison.residuals.items()):
        print(f"    {name}: {_fmt_res(value)}")
    print(f"  max residual: {_fmt_res(comparison.max_residual)}")
    return EXIT_OK


def _cmd_fock_demo(args) -> int:
    expansion = expand_position_state(args.x, 1.0, args.nmax)
    witness = divergence_witness(args.x, args.nmax) if args.nmax >= 50 else None
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write("n,c,c_squared,partial_norm\n")
            for n, (c, s) in enumerate(zip(expansion.coeffs, expansion.partial_norms)):
                fh.write(f"{n},{float(c)!r},{float(c * c)!r},{float(s)!r}\n")
    payload = {
        "x": args.x,
        "nmax": args.nmax,
        "oscillator_contrast": oscillator_contrast(min(args.nmax, 64)),
        "partial_norm_final": float(expansion.partial_norms[-1]),
        "fitted_tail_exponent": witness.fitted_tail_exponent if witness else None,
    }
    if args.output == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
        return EXIT_OK
    print(f"position eigenstate at x = {_fmt(args.x)}, truncated at n = {args.nmax}")
    head = min(8, args.nmax)
    print("  first coefficients: " + ", ".join(_fmt(c) for c in expansion.coeffs[: head + 1]))
    print(f"  partial Dirac norm at n={args.nmax}: {_fmt(expansion.partial_norms[-1])}")
    if witness is not None:
        print(f"  fitted tail exponent of c_n^2: {_fmt(witness.fitted_tail_exponent)}"
              " (above -1 certifies the comparison series diverges;"
              " a finite stand-in for the limit statement)")
    print(f"  oscillator contrast (eigenstates unit-normalized): "
          f"{payload['oscillator_contrast']}")
    if args.csv:
        print(f"  coefficient table written to {args.csv}")
    return EXIT_OK


def _cmd_evolve(args) -> int:
    report = run_analyze(_config_from_args(args))
    payload = {
        "times": report.time_independence["times"],
        "max_drift": report.time_independence["max_drift"],
        "max_zero_entry_shadow": report.time_independence["max_zero_entry_shadow"],
        "selection_rule_violations": report.selection_rule_violations,
        "flags": {"time_independent": report.flags["time_independent"]},
    }
    if args.output == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
        return EXIT_OK
    print(f"times: {[_fmt(t) for t in payload['times']]}")
    print(f"max drift of <R_n(t)|V|R_m(t)>: {_fmt_res(payload['max_drift'])}")
    if payload["max_zero_entry_shadow"] > 0.0:
        print(f"amplified shadow of zero entries: {_fmt_res(payload['max_zero_entry_shadow'])}"
              " (precision dust scaled by mode growth, not drift)")
    flag = payload["flags"]["time_independent"]
    print(f"time independent: {'pass' if flag['passed'] else 'FAIL'}"
          f" (threshold {_fmt_res(flag['threshold'])})")
    if payload["selection_rule_violations"]:
        print(f"selection-rule violations: {payload['selection_rule_violations']}")
    return EXIT_OK


_COMMANDS = {
    "analyze": _cmd_analyze,
    "batch": _cmd_batch,
    "two-level": _cmd_two_level,
    "fock-demo": _cmd_fock_demo,
    "evolve": _cmd_evolve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except PTHamilError as exc:
        entry = error_entry(exc)
        output = getattr(args, "output", "text")
        if output == "json":
            print(json.dumps({"error": entry}, indent=2, sort_keys=True))
        else:
            print(f"error: {entry['message']}", file=sys.stderr)
            if "note" in entry:
                print(f"note: {entry['note']}", file=sys.stderr)
        return entry["exit_code"]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
