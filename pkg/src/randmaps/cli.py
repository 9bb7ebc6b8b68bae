"""Command-line front end.

Every command writes ``#``-prefixed header lines (seed, config, version)
followed by CSV.  Output is a function of (system, config, seed) only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .clt import Observable, center_observable, ks_normality, sample_Sn
from .hypotheses import certify, example22_system
from .measure import AtomMeasure, WalkRng, invariant_estimate, quantile_prune, wasserstein1
from .pwlin import BreakpointBudgetError, PwlError, compose, identity, total_variation
from .systemfile import SystemFileError, parse_observable, parse_system
from .walk import bifurcation_experiment, sample_word, stability_experiment, theta_samples

SEED_ENV = "RANDMAPS_SEED"
EXIT_FAIL = 1
EXIT_VIOLATION = 2
EXIT_USAGE = 64

# flags that affect scheduling but not results; kept out of the header
_NOT_ECHOED = {"func", "file", "command", "workers", "json", "p_value_cmd"}


def fmt_float(v: float) -> str:
    return format(float(v), ".17g")


def fmt_bool(b: bool) -> str:
    return "true" if b else "false"


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}") from None


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def _header(args, source: str) -> list[str]:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED and v is not None}
    config["system"] = source
    seed = config.pop("seed", None)
    return [
        f"# seed={seed if seed is not None else '-'} command={args.command} artifact-version={__version__}",
        "# config=" + json.dumps(config, sort_keys=True, default=str),
    ]


def _emit(args, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- commands ---------------------------------------------------------------


def cmd_check(args, system, source) -> int:
    rep = certify(system)
    if args.json:
        payload = {
            "condition_A": rep.condition_A,
            "uncovered": [str(iv) for iv in rep.uncovered],
            "below_diag_left": rep.below_diag_left,
            "below_witness": rep.below_witness,
            "above_diag_right": rep.above_diag_right,
            "above_witness": rep.above_witness,
            "mu_injective": rep.mu_injective,
            "injectivity_margin": str(rep.injectivity_margin),
            "margin_argmax": str(rep.margin_argmax),
            "ok": rep.ok,
        }
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        rows = [
            ("condition (A)", fmt_bool(rep.condition_A)),
            ("uncovered", " ".join(str(iv) for iv in rep.uncovered) or "-"),
            ("below diagonal (left)", fmt_bool(rep.below_diag_left)),
            ("below witness", rep.below_witness or "-"),
            ("above diagonal (right)", fmt_bool(rep.above_diag_right)),
            ("above witness", rep.above_witness or "-"),
            ("mu-injective", fmt_bool(rep.mu_injective)),
            ("margin", str(rep.injectivity_margin)),
            ("margin argmax", str(rep.margin_argmax)),
        ]
        width = max(len(k) for k, _ in rows)
        lines = _header(args, source) + [f"{k.ljust(width)} : {v}" for k, v in rows]
        sys.stdout.write("\n".join(lines) + "\n")
    return 0 if rep.ok else EXIT_FAIL


def cmd_invariant(args, system, source) -> int:
    est = invariant_estimate(system, args.prune_to, args.steps, args.burn_in)
    t, F = est.measure.cdf_table()
    lines = _header(args, source) + [f"# residual={fmt_float(est.residual)}", "t,F(t)"]
    lines += [f"{fmt_float(a)},{fmt_float(b)}" for a, b in zip(t, F)]
    _emit(args, lines)
    return 0


def cmd_stability(args, system, source) -> int:
    if len(args.probes) != 2:
        raise SystemExit("stability needs exactly two probes")
    a, b = (AtomMeasure.dirac(p) for p in args.probes)
    trace = stability_experiment(system, a, b, args.steps, args.prune_to)
    lines = _header(args, source) + ["k,d_W"] + [f"{k},{fmt_float(d)}" for k, d in trace]
    _emit(args, lines)
    return 0


def cmd_bifurcation(args, system, source) -> int:
    mat = bifurcation_experiment(system, args.probes, args.steps, args.prune_to)
    lines = _header(args, source) + ["probe," + ",".join(fmt_float(p) for p in args.probes)]
    for p, row in zip(args.probes, mat):
        lines.append(fmt_float(p) + "," + ",".join(fmt_float(v) for v in row))
    _emit(args, lines)
    return 0


def cmd_proximality(args, system, source) -> int:
    nu = invariant_estimate(system, args.prune_to, args.steps, args.burn_in).measure
    sample = quantile_prune(nu.positions, nu.weights, args.sample)
    rng = WalkRng(args.seed)
    res = theta_samples(system, rng, sample, args.words, args.n, workers=args.workers)
    bary = wasserstein1(AtomMeasure([mid for _, mid in res]), nu)
    lines = _header(args, source) + [f"# barycenter_distance={fmt_float(bary)}", "word,diameter,theta"]
    lines += [f"{k},{fmt_float(d)},{fmt_float(m)}" for k, (d, m) in enumerate(res)]
    _emit(args, lines)
    return 0


def cmd_variation(args, system, source) -> int:
    rng = WalkRng(args.seed)
    lines = _header(args, source) + ["trial,k,letter,V_k,E_next,holds"]
    violated = False
    for trial in range(args.trials):
        word = sample_word(rng, system, args.word_len, trial)
        f = identity()
        for k in range(args.word_len + 1):
            letter = "-" if k == 0 else system.labels[word[k - 1]]
            try:
                if k > 0:
                    f = compose(f, system.maps[word[k - 1]], cap=args.cap)
                lhs = sum(
                    (w * total_variation(compose(f, g, cap=args.cap)) for w, g in zip(system.weights, system.maps)),
                    Fraction(0),
                )
            except BreakpointBudgetError:
                lines.append(f"{trial},{k},{letter},budget,budget,-")
                break
            rhs = total_variation(f)
            holds = lhs <= rhs
            violated |= not holds
            lines.append(f"{trial},{k},{letter},{rhs},{lhs},{fmt_bool(holds)}")
    rep = certify(system)
    lines.insert(2, f"# mu_injective={fmt_bool(rep.mu_injective)}")
    _emit(args, lines)
    # the inequality is guaranteed only for mu-injective systems
    return EXIT_VIOLATION if violated and rep.mu_injective else 0


def _observable(text: str) -> Observable:
    if text.startswith("builtin:"):
        name = text.split(":", 1)[1]
        if name == "x":
            return Observable.identity()
        if name == "abs":
            return Observable.from_points([(0, Fraction(1, 2)), (Fraction(1, 2), 0), (1, Fraction(1, 2))])
        raise SystemExit(f"unknown builtin observable {name!r} (known: x, abs)")
    return parse_observable(Path(text).read_text(encoding="utf-8"))


def cmd_clt(args, system, source) -> int:
    nu = invariant_estimate(system, args.prune_to, args.steps, args.burn_in).measure
    phi = center_observable(_observable(args.phi), nu)
    rng = WalkRng(args.seed)
    summary = []
    half = max(args.n // 2, 1)
    for n in sorted({half, args.n}):
        s = sample_Sn(system, phi, args.x, n, args.trials, rng, include_x0=args.include_x0, workers=args.workers)
        summary.append((n, s))
    lines = _header(args, source) + [f"# centered_offset={fmt_float(phi.centered_offset)}"]
    lines += [
        f"# summary n={n} sigma2_hat={fmt_float(s.sigma2_hat)} ks={fmt_float(ks_normality(s))}" for n, s in summary
    ]
    final = summary[-1][1]
    lines.append("trial,S_n")
    lines += [f"{k},{fmt_float(v)}" for k, v in enumerate(final.values)]
    _emit(args, lines)
    return 0


# -- parser -----------------------------------------------------------------


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def _add_commands(sub, with_file: bool) -> None:
    def command(name, func, help):
        p = sub.add_parser(name, help=help)
        if with_file:
            p.add_argument("file", help="system description file")
        p.set_defaults(func=func, command=name)
        return p

    p = command("check", cmd_check, "certify the hypotheses exactly")
    p.add_argument("--json", action="store_true")

    def measure_opts(p, steps=400, burn_in=100, prune_to=2000):
        p.add_argument("--steps", type=_positive, default=steps)
        p.add_argument("--burn-in", type=_nonneg, default=burn_in)
        p.add_argument("--prune-to", type=_positive, default=prune_to)

    p = command("invariant", cmd_invariant, "Cesaro estimate of the invariant measure (CDF)")
    measure_opts(p)
    p.add_argument("--out")

    p = command("stability", cmd_stability, "d_W trace between two Dirac starts")
    p.add_argument("--probes", type=_float_list, default=[0.1, 0.9])
    p.add_argument("--steps", type=_positive, default=200)
    p.add_argument("--prune-to", type=_positive, default=2000)
    p.add_argument("--out")

    p = command("bifurcation", cmd_bifurcation, "pairwise final d_W between Dirac starts")
    p.add_argument("--probes", type=_float_list, default=[0.05, 0.95])
    p.add_argument("--steps", type=_positive, default=200)
    p.add_argument("--prune-to", type=_positive, default=2000)
    p.add_argument("--out")

    p = command("proximality", cmd_proximality, "backward collapse diameters and barycenter distance")
    p.add_argument("--words", type=_positive, default=200)
    p.add_argument("--n", type=_positive, default=400)
    p.add_argument("--sample", type=_positive, default=200)
    measure_opts(p)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--out")

    p = command("variation", cmd_variation, "exact variation traces and supermartingale table")
    p.add_argument("--word-len", type=_nonneg, default=6)
    p.add_argument("--trials", type=_positive, default=10)
    p.add_argument("--cap", type=_positive, default=100_000)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out")

    p = command("clt", cmd_clt, "S_n sample, sigma^2 estimate and KS distance")
    p.add_argument("--phi", default="builtin:x")
    p.add_argument("--x", type=float, default=0.3)
    p.add_argument("--n", type=_positive, default=4000)
    p.add_argument("--trials", type=_positive, default=10_000)
    p.add_argument("--include-x0", action="store_true")
    measure_opts(p)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="randmaps", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    _add_commands(sub, with_file=True)
    ex = sub.add_parser("example22", help="run a command on the built-in three-map family")
    ex.add_argument("--p", required=True, help="weight of each contraction, a rational in (0, 1/2)")
    exsub = ex.add_subparsers(dest="p_value_cmd", required=True)
    _add_commands(exsub, with_file=False)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "file", None) is not None:
            source = args.file
            system = parse_system(Path(args.file).read_text(encoding="utf-8"))
        else:
            source = f"example22(p={Fraction(args.p)})"
            system = example22_system(Fraction(args.p))
            del args.p
    except (SystemFileError, PwlError, ValueError, ZeroDivisionError, OSError) as exc:
        print(f"randmaps: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args, system, source)


if __name__ == "__main__":
    sys.exit(main())
