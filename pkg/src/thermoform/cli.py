"""Command-line front end.

Every subcommand prints a short summary, writes ``result.txt`` (flat
``key = value`` with 17 significant digits) and, where there is a table, a
CSV file into ``--out``.  Exit status: 0 success, 1 bad input, 2 numerical
failure.
"""

import argparse
import math
import os
import sys

import numpy as np

from . import io
from .errors import InputError, NumericalError

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2

# knob name -> (type, default); config files may set any of these
KNOBS = {
    "sft": (str, None),
    "potential": (str, None),
    "observable": (str, None),
    "psi": (str, None),
    "expansion": (str, None),
    "coding": (str, None),
    "matrix": (str, "2,1,1,1"),
    "depth": (int, None),
    "nmax": (int, None),
    "n": (int, 1000),
    "trials": (int, 10000),
    "seed": (int, 0),
    "workers": (int, 1),
    "out": (str, "thermoform-out"),
    "tol": (float, 1e-10),
    "step": (float, 1e-3),
    "dg_sup": (float, 3.0),
    "metric_base": (float, 0.5),
    "curve": (int, 0),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _short(x):
    if isinstance(x, (bool, np.bool_)):
        return io.format_number(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x == 0 or 1e-4 <= abs(x) < 1e6:
            return f"{x:.6f}"
        return f"{x:.6e}"
    return str(x)


class Run:
    """Resolved options plus the output sink for one invocation."""

    def __init__(self, name, opts):
        self.name = name
        self.opts = opts
        self.items = []

    def __getattr__(self, key):
        try:
            return self.opts[key]
        except KeyError:
            raise AttributeError(key)

    def emit(self, key, value):
        self.items.append((key, value))
        print(f"{key} = {_short(value)}")

    def table(self, filename, header, rows):
        io.ensure_dir(self.out)
        io.write_csv(os.path.join(self.out, filename), header, rows)

    def finish(self):
        io.ensure_dir(self.out)
        io.write_results(os.path.join(self.out, "result.txt"), self.items)

    def require(self, key):
        if self.opts.get(key) is None:
            raise InputError(f"--{key.replace('_', '-')} is required for {self.name}")
        return self.opts[key]

    # shared loaders
    def load_sft(self):
        return io.read_sft(self.require("sft"))

    def load_potential(self, A, key="potential"):
        from .potentials import zero_potential

        path = self.opts.get(key)
        return io.read_potential(path, A) if path else zero_potential(A)

    def load_observable(self, A):
        from .potentials import symbol_potential

        path = self.opts.get("observable")
        if path:
            return io.read_potential(path, A)
        # default: indicator of symbol 0
        return symbol_potential(A, [1.0] + [0.0] * (A.size - 1))


def _word(w):
    return "".join(str(a) for a in w) if max(w, default=0) < 10 else "-".join(map(str, w))


# --- subcommands ----------------------------------------------------------------------


def cmd_entropy(run):
    from .sft import count_admissible, count_fixed, is_primitive, topological_entropy

    A = run.load_sft()
    prim, witness = is_primitive(A)
    run.emit("alphabet_size", A.size)
    run.emit("primitive", prim)
    if prim:
        run.emit("primitivity_exponent", witness)
    run.emit("entropy", topological_entropy(A))
    nmax = run.nmax or 10
    run.table("words.csv", ["n", "admissible_words", "fixed_points"],
              [(n, count_admissible(A, n), count_fixed(A, n)) for n in range(1, nmax + 1)])


def cmd_pressure(run):
    from .transfer import build_operator, leading_triple, spectral_gap

    A = run.load_sft()
    phi = run.load_potential(A)
    op = build_operator(A, phi, run.depth)
    tr = leading_triple(op)
    gap = spectral_gap(op, metric_base=run.metric_base, triple=tr)
    run.emit("depth", op.depth)
    run.emit("pressure", tr.pressure)
    run.emit("leading_eigenvalue", tr.lam)
    run.emit("iterations", tr.iterations)
    run.emit("residual", tr.residual)
    run.emit("lambda2_magnitude", gap.lambda2_mag)
    run.emit("spectral_gap", gap.gap)
    run.emit("gap_lower_bound", gap.gap_lower_bound)
    run.table("eigendata.csv", ["word", "h", "nu"],
              [(_word(w), a, b) for w, a, b in zip(op.words, tr.h, tr.nu)])


def cmd_gibbs(run):
    from .transfer import build_operator, gibbs_constants, gibbs_weights, leading_triple

    A = run.load_sft()
    phi = run.load_potential(A)
    op = build_operator(A, phi, run.depth)
    tr = leading_triple(op)
    mu = gibbs_weights(tr)
    c1, c2 = gibbs_constants(tr, op.depth)
    run.emit("depth", op.depth)
    run.emit("pressure", tr.pressure)
    run.emit("stationarity_defect", mu.stationarity_defect())
    run.emit("gibbs_c1", c1)
    run.emit("gibbs_c2", c2)
    run.table("gibbs.csv", ["word", "weight"], [(_word(w), x) for w, x in zip(op.words, mu.weights)])


def cmd_mix(run):
    from .statistics import correlation
    from .transfer import build_operator, leading_triple

    A = run.load_sft()
    phi = run.load_potential(A)
    g = run.load_observable(A)
    m = run.depth or max(phi.range, g.range, 2)
    tr = leading_triple(build_operator(A, phi, m))
    rep = correlation(tr, g, g, run.nmax or 40)
    run.emit("mean", rep.mean_g)
    run.emit("fitted_rate", rep.fitted_rate)
    run.emit("predicted_rate", rep.predicted_rate)
    run.table("correlations.csv", ["lag", "correlation"], rep.rows())


def cmd_clt(run):
    from .statistics import clt_monte_carlo, green_kubo
    from .transfer import build_operator, gibbs_weights, leading_triple

    A = run.load_sft()
    phi = run.load_potential(A)
    g = run.load_observable(A)
    m = run.depth or max(phi.range, g.range, 2)
    tr = leading_triple(build_operator(A, phi, m))
    gk = green_kubo(tr, g)
    res = clt_monte_carlo(gibbs_weights(tr), g, run.n, run.trials, run.seed,
                          sigma2_ref=gk.sigma2, workers=run.workers)
    run.emit("n", run.n)
    run.emit("trials", run.trials)
    run.emit("seed", run.seed)
    run.emit("mean_removed", res.mean_removed)
    run.emit("sample_mean", res.sample_mean)
    run.emit("sample_variance", res.sample_var)
    run.emit("green_kubo_variance", gk.sigma2)
    run.emit("relative_difference", abs(res.sample_var - gk.sigma2) / gk.sigma2 if gk.sigma2 else math.nan)
    run.emit("fraction_beyond_1.96_sigma", res.frac_beyond_196)
    run.table("batches.csv", ["batch", "trials", "mean", "variance"], res.batches)
    run.table("covariances.csv", ["k", "covariance"],
              [(0, gk.var0)] + [(k, c) for k, c in enumerate(gk.covariances, 1)])


def cmd_derivatives(run):
    from .statistics import pressure_derivative_check

    A = run.load_sft()
    phi = run.load_potential(A)
    psi = io.read_potential(run.require("psi"), A)
    d = pressure_derivative_check(A, phi, psi, step=run.step, m=run.depth)
    run.emit("first_numeric", d.numeric_first)
    run.emit("first_analytic", d.analytic_first)
    run.emit("first_relative_error", d.first_rel_error)
    run.emit("second_numeric", d.numeric_second)
    run.emit("second_analytic", d.analytic_second)
    run.emit("second_relative_error", d.second_rel_error)


def cmd_zeta(run):
    from .transfer import build_operator, leading_triple
    from .zeta import POLY_LIMIT, fredholm_poly, orbit_sums, pole_locate

    A = run.load_sft()
    phi = run.load_potential(A)
    op = build_operator(A, phi, run.depth)
    trunc = orbit_sums(A, phi, run.nmax or 12)
    z = pole_locate(op)
    P = leading_triple(op).pressure
    run.emit("depth", op.depth)
    run.emit("pole", z)
    run.emit("log_inverse_pole", math.log(1 / z))
    run.emit("pressure", P)
    run.emit("pole_pressure_difference", abs(math.log(1 / z) - P))
    run.emit("radius_estimate", trunc.radius_estimate)
    run.table("orbit_sums.csv", ["n", "a_n", "a_n_root"], trunc.rows())
    if op.dim <= POLY_LIMIT:
        poly = fredholm_poly(op)
        run.table("fredholm.csv", ["degree", "coefficient"], list(enumerate(poly.coefficients)))


def cmd_bowen(run):
    from .dimension import ConformalRepeller, bowen_root, pressure_curve

    A = run.load_sft()
    ell = io.read_potential(run.require("expansion"), A)
    rep = ConformalRepeller(A, ell)
    root = bowen_root(rep, run.tol, run.depth)
    run.emit("dimension", root.s_star)
    run.emit("pressure_residual", root.residual)
    if run.curve:
        grid = np.linspace(0.0, 2 * root.s_star if root.s_star > 0 else 1.0, run.curve)
        run.table("pressure_curve.csv", ["s", "pressure"], pressure_curve(rep, grid, run.depth))


def cmd_stability(run):
    from .statistics import equilibrium_stability_probe

    A = run.load_sft()
    phi = run.load_potential(A)
    direction = run.load_observable(A)
    count = run.nmax or 6
    deltas = [direction * 2.0 ** (-j) for j in range(count)]
    probe = equilibrium_stability_probe(A, phi, deltas, m=run.depth,
                                        metric_base=run.metric_base)
    run.emit("perturbations", count)
    run.emit("lipschitz_slope", probe.slope)
    run.table("stability.csv", ["sup_norm", "wasserstein"], probe.rows)


def cmd_catmap_report(run):
    from .smooth import catmap_report

    try:
        entries = [int(x) for x in run.matrix.split(",")]
    except ValueError:
        raise InputError("--matrix takes four comma-separated integers")
    if len(entries) != 4:
        raise InputError("--matrix takes four comma-separated integers")
    coding = io.read_sft(run.require("coding"))
    report = catmap_report(np.array(entries).reshape(2, 2), coding, run.dg_sup)
    for key, val in report.items():
        run.emit(key, val)


COMMANDS = {
    "entropy": (cmd_entropy, "topological entropy and word counts"),
    "pressure": (cmd_pressure, "pressure, eigendata and spectral gap"),
    "gibbs": (cmd_gibbs, "Gibbs cylinder weights"),
    "mix": (cmd_mix, "decay of correlations"),
    "clt": (cmd_clt, "Monte Carlo CLT against the Green-Kubo variance"),
    "derivatives": (cmd_derivatives, "pressure derivatives, numeric vs analytic"),
    "zeta": (cmd_zeta, "periodic-orbit sums, Fredholm determinant, leading pole"),
    "bowen": (cmd_bowen, "Hausdorff dimension from Bowen's equation"),
    "stability": (cmd_stability, "Wasserstein stability of equilibrium states"),
    "catmap-report": (cmd_catmap_report, "constants of a hyperbolic toral automorphism"),
}


def build_parser():
    parser = _Parser(prog="thermoform", description="Thermodynamic formalism toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, helptext) in COMMANDS.items():
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="key = value file; flags override it")
        for key, (typ, default) in KNOBS.items():
            p.add_argument("--" + key.replace("_", "-"), dest=key, type=typ, default=None,
                           help=f"default: {default}")
    return parser


def resolve(args):
    """Merge built-in defaults, config file and flags (flags win)."""
    opts = {k: d for k, (_, d) in KNOBS.items()}
    if args.config:
        for key, raw in io.read_config(args.config).items():
            if key not in KNOBS:
                raise InputError(f"unknown config key {key!r}")
            typ = KNOBS[key][0]
            try:
                opts[key] = typ(raw)
            except ValueError:
                raise InputError(f"config key {key!r}: cannot parse {raw!r}")
    for key in KNOBS:
        val = getattr(args, key)
        if val is not None:
            opts[key] = val
    if opts["workers"] < 1 or opts["trials"] < 1 or opts["n"] < 1:
        raise InputError("workers, trials and n must be positive")
    return opts


def main(argv=None):
    args = build_parser().parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        run = Run(args.command, resolve(args))
        func(run)
        run.finish()
    except (InputError, OSError) as exc:
        print(f"thermoform {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"thermoform {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
