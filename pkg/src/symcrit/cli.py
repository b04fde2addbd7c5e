"""Command-line front end.

Usage::

    symcrit check SPEC.toml [--out DIR] [--threads N] [--seed N] [--print-spec]

Subcommands: ``check``, ``fit``, ``estimate-symbol``, ``stationary-density``
and ``simulate``.  Exit codes: 0 consistent / success, 2 violated,
3 inconclusive, 64 invalid input, 65 numeric failure.  Outputs are written
once, atomically, after every computation has succeeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from typing import Optional, Sequence

import numpy as np

from . import specfile
from .criterion import STANDARD_NOTES, residual_profile
from .errors import InputError, SymcritError
from .fit import FitProblem, fit_invariant, gaussian_family
from .simulate import empirical_law, estimate_symbol, simulate_path
from .stationary import fokker_planck_residual, stationary_density

EXIT_OK = 0
EXIT_USAGE = 64
EXIT_NUMERIC = 65

BANNERS = {
    "canonical": "convention: canonical (Gaussian part 1/2 xi'Q xi; Brownian motion has exponent xi^2/2)",
    "paper": "convention: paper (Gaussian part xi'Q xi without the 1/2; covariances doubled throughout)",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("spec", help="TOML process/measure spec")
    common.add_argument("--out", default=".", help="output directory (default: current)")
    common.add_argument("--seed", type=_int, default=None, help="override [simulate].seed")
    common.add_argument("--threads", type=_positive_int, default=None,
                        help="worker threads (default: SYMCRIT_THREADS or all cores)")
    common.add_argument("--print-spec", action="store_true",
                        help="print the normalized spec and exit")
    parser = _Parser(prog="symcrit", description="Symbol-based invariance checks for Ito processes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (("check", "evaluate the criterion residual on the frequency grid"),
                       ("fit", "fit a Gaussian law by minimising the residual"),
                       ("estimate-symbol", "Monte Carlo estimate of the symbol at [simulate].x0"),
                       ("stationary-density", "stationary density of a 1-d diffusion"),
                       ("simulate", "simulate a path or an empirical stationary sample")):
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


# ---------------------------------------------------------------------------
# output

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def csv_text(header: Optional[Sequence[str]], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(directory: str, name: str, text: str) -> str:
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        target = os.path.join(directory, name)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def _run_notes(built) -> list:
    return list(STANDARD_NOTES) + list(built.symbol.notes) + built.notes


def _notes_block(notes) -> str:
    seen, lines = set(), ["hypothesis notes:"]
    for n in notes:
        if n not in seen:
            seen.add(n)
            lines.append(f"  - {n}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# commands; each returns (exit code, {filename: text}, notes, summary lines)

def _check(built, args):
    doc = built.doc
    rep = residual_profile(built.symbol, built.measure, built.grid, tol=doc["check"]["tol"],
                           threads=args.threads, notes=built.notes, rtol=doc["quadrature"]["rel_tol"])
    rows = [(xi[0], s.real, s.imag, abs(s), e) for xi, s, e in zip(rep.grid, rep.residuals, rep.errors)]
    files = {"report.csv": csv_text(("xi", "re_S", "im_S", "abs_S", "err_est"), rows)}
    return rep.verdict.exit_code, files, rep.hypothesis_notes, [rep.summary()]


def _fit(built, args):
    f = built.doc["fit"]
    problem = FitProblem(built.symbol, gaussian_family(tuple(f["mean"]), tuple(f["variance"])),
                         built.grid, objective=f["objective"])
    seed = args.seed if args.seed is not None else built.doc["simulate"]["seed"]
    res = fit_invariant(problem, max_iter=f["max_iter"], tol=f["tol"], restarts=f["restarts"], seed=seed)
    files = {"fit.csv": csv_text(("mean", "variance", "objective_value", "iterations", "converged"),
                                 [(res.params[0], res.params[1], res.objective_value, res.iterations,
                                   res.converged)])}
    lines = [f"fit: mean = {res.params[0]:.10g}, variance = {res.params[1]:.10g}",
             f"  objective ({f['objective']}): {res.objective_value:.6e}",
             f"  converged: {res.converged} after {res.iterations} iterations",
             "  a zero objective certifies infinitesimal invariance only, not uniqueness"]
    return EXIT_OK, files, _run_notes(built), lines


def _need_sde(built, command):
    if built.sde is None:
        raise InputError(f"{command} needs a simulatable process; kind "
                         f"{built.doc['process']['kind']!r} has no SDE form")
    return built.sde


def _estimate(built, args):
    sde = _need_sde(built, "estimate-symbol")
    sim = built.doc["simulate"]
    seed = args.seed if args.seed is not None else sim["seed"]
    t, x0 = sim["t"], sim["x0"]
    dt = min(sim["dt"], t / 64)
    rows, lines = [], [f"symbol estimate at x = {x0:g}, t = {t:g}, {sim['n_paths']} paths"]
    notes = _run_notes(built)
    for xi in sim["xi"]:
        est = estimate_symbol(sde, x0, xi, t, n_paths=sim["n_paths"], seed=seed, dt=dt, threads=args.threads)
        exact = built.symbol(x0, xi)
        rows.append((xi, est.value.real, est.value.imag, est.std_error, exact.real, exact.imag, t, est.n_paths))
        lines.append(f"  xi = {xi:g}: {est.value.real:.6g}{est.value.imag:+.6g}i "
                     f"(se {est.std_error:.3g}); symbol {exact.real:.6g}{exact.imag:+.6g}i")
        notes += list(est.notes)
    header = ("xi", "re_lambda", "im_lambda", "std_error", "re_p", "im_p", "t", "n_paths")
    return EXIT_OK, {"estimate.csv": csv_text(header, rows)}, notes, lines


def _stationary(built, args):
    if built.diffusion is None:
        raise InputError("stationary-density needs process kind 'diffusion1d' or 'ou'")
    res = stationary_density(built.diffusion)
    st = built.doc["stationary"]
    lo, hi = (st["x_min"], st["x_max"]) if "x_min" in st else res.window
    x = np.linspace(lo, hi, st["n"])
    probe = np.linspace(*res.window, 22)[1:-1]
    fp = max(fokker_planck_residual(built.diffusion, res.pi, v) for v in probe)
    lines = [f"stationary density on window [{res.window[0]:g}, {res.window[1]:g}]",
             f"  M = {res.M:.15g} (error estimate {res.M_error:.2e})",
             f"  mass check: {res.mass_check:.12f}",
             f"  max Fokker-Planck first-integral residual at 20 points: {fp:.3e}"]
    notes = _run_notes(built)
    if not res.scale_diverges:
        notes.append(f"int s over the window is only {res.scale_integral:.3g}; "
                     "recurrence (int s = infinity) is not evident numerically")
    return EXIT_OK, {"stationary.csv": csv_text(("x", "pi"), res.table(x))}, notes, lines


def _simulate(built, args):
    sde = _need_sde(built, "simulate")
    sim = built.doc["simulate"]
    seed = args.seed if args.seed is not None else sim["seed"]
    notes = _run_notes(built) + list(sde.notes())
    if sim["output"] == "path":
        path = simulate_path(sde, sim["x0"], sim["t_end"], sim["dt"], seed=seed)
        text = csv_text(("t", "x"), ((t, s[0]) for t, s in zip(path.times, path.states)))
        lines = [f"simulated path: {path.times.size} points on [0, {sim['t_end']:g}], dt = {sim['dt']:g}"]
        return EXIT_OK, {"path.csv": text}, notes, lines
    law = empirical_law(sde, sim["x0"], sim["burn_in"], sim["n_samples"], sim["sample_gap"], sim["dt"],
                        seed=seed, threads=args.threads)
    pts = law.points[:, 0]
    lines = [f"empirical sample: {pts.size} points, mean {pts.mean():.6g}, variance {pts.var(ddof=1):.6g}"]
    return EXIT_OK, {"samples.csv": csv_text(None, law.points)}, notes, lines


COMMANDS = {"check": _check, "fit": _fit, "estimate-symbol": _estimate,
            "stationary-density": _stationary, "simulate": _simulate}


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    """Run the CLI and return the exit code (never raises ``SystemExit``)."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = make_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else int(exc.code)
    try:
        doc = specfile.load(args.spec)
    except specfile.SpecError as exc:
        print(f"symcrit: invalid spec {args.spec}: {exc}", file=stderr)
        return EXIT_USAGE
    if args.print_spec:
        stdout.write(specfile.dumps(doc))
        return EXIT_OK
    print(BANNERS[doc["mode"]["convention"]], file=stdout)
    try:
        built = specfile.build(doc, with_measure=args.command == "check")
        code, files, notes, lines = COMMANDS[args.command](built, args)
    except InputError as exc:
        print(f"symcrit: invalid input: {exc}", file=stderr)
        return EXIT_USAGE
    except (SymcritError, ArithmeticError) as exc:
        print(f"symcrit: numeric failure in {args.command}: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERIC
    except Exception as exc:                    # noqa: BLE001  last-resort context for exit 65
        print(f"symcrit: unexpected failure in {args.command}: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERIC
    try:
        written = [write_atomic(args.out, name, text) for name, text in files.items()]
    except OSError as exc:
        print(f"symcrit: cannot write output: {exc}", file=stderr)
        return EXIT_USAGE
    for line in lines:
        print(line, file=stdout)
    print(_notes_block(notes), file=stdout)
    for path in written:
        print(f"wrote {path}", file=stdout)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
