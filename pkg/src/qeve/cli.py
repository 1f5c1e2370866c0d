"""
Command-line entry point: ``qeve curve``, ``qeve verify`` and ``qeve simulate``.

Exit codes are 0 on success, 1 for runtime or verification failures and
2 for usage errors.
"""

import argparse
import csv
import io
import sys

import numpy as np

from .cloning import KINDS as CLONER_KINDS, ClonerSpec, clone
from .entanglement import TILTED_SETTING, singlet_fraction
from .information import gamma_for_ber, info_ab, info_eve_intensity, optimize_info
from .probe import IntensityGamma, epr_joint, eve_joint, intercept_resend
from .states import bloch_of
from .simulate import EveStrategy, SimConfig, broadcast_sim, report_fields, run, to_json
from .verify import format_table, run_all

QUANTITIES = (
    "i_ab",
    "i_ae_intensity",
    "i_ae_optimal",
    "intercept_resend",
    "s_ab",
    "s_ae",
    "singlet_fraction",
    "bloch_locus",
)


class UsageError(Exception):
    pass


def _fmt(x):
    if isinstance(x, str):
        return x
    return f"{float(x):.12g}"


def curve_rows(quantity, grid, degrees=False, symmetrized=False, cloner="pgqcm", alpha=None):
    """Header and rows for one curve; ``grid`` is in the user's unit."""
    to_rad = np.deg2rad if degrees else (lambda v: v)
    unit = "deg" if degrees else "rad"
    sym = "sym" if symmetrized else "unsym"
    rows = []
    if quantity == "i_ab":
        header = ["q", "i_ab"]
        rows = [(q, info_ab(q)) for q in grid]
    elif quantity == "i_ae_intensity":
        header = ["q", "i_ae", "gamma_rad"]
        for q in grid:
            g = gamma_for_ber(q)
            rows.append((q, info_eve_intensity(g), g))
    elif quantity == "i_ae_optimal":
        header = ["q", "i_ae", "alpha_rad", "beta_rad"]
        for q in grid:
            best = optimize_info(q)
            rows.append((q, best.i_ae, best.params.alpha, best.params.beta))
    elif quantity == "intercept_resend":
        header = ["p", "q", "i_ae"]
        rows = [(p, *intercept_resend(p)) for p in grid]
    elif quantity in ("s_ab", "s_ae", "singlet_fraction"):
        header = [f"gamma_{unit}", quantity, "strategy"]
        for g in grid:
            p = IntensityGamma(float(to_rad(g)))
            if quantity == "s_ab":
                y = abs(TILTED_SETTING.value(epr_joint(p, symmetrized)))
            elif quantity == "s_ae":
                y = abs(TILTED_SETTING.value(eve_joint(p, symmetrized)))
            else:
                y = singlet_fraction(epr_joint(p, symmetrized))
            rows.append((g, y, f"intensity_{sym}"))
    elif quantity == "bloch_locus":
        spec = ClonerSpec(cloner) if alpha is None else ClonerSpec(cloner, float(to_rad(alpha)))
        header = [f"theta_{unit}", "x", "y", "z", "cloner"]
        for t in grid:
            r = bloch_of(clone(spec, float(to_rad(t))).rho_copy)
            rows.append((t, *r, spec.label()))
    else:
        raise UsageError(f"unknown quantity {quantity!r}")
    return header, rows


def write_csv(header, rows, stream):
    w = csv.writer(stream, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])


def _grid(args):
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    if not args.min < args.max:
        raise UsageError("--min must be smaller than --max")
    return np.linspace(args.min, args.max, args.steps)


def _emit(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def cmd_curve(args):
    grid = _grid(args)
    try:
        header, rows = curve_rows(
            args.quantity, grid, args.degrees, args.symmetrized, args.cloner, args.alpha
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    buf = io.StringIO()
    write_csv(header, rows, buf)
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_verify(args):
    rows = run_all()
    _emit(format_table(rows), args.out)
    return 0 if all(r.passed for r in rows) else 1


def read_config(path):
    """Flat ``key = value`` file with ``#`` comments."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _truthy(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"expected a boolean, got {text!r}")


SIM_KEYS = {
    "protocol": str,
    "eve": str,
    "n": int,
    "n_pulses": int,
    "seed": int,
    "threads": int,
    "delayed": _truthy,
    "exact": _truthy,
    "degrees": _truthy,
    "broadcast": str,
}


def sim_settings(args):
    """Merge defaults, the config file and command-line flags (flags win)."""
    settings = dict(protocol="bb84", eve="none", n=100_000, seed=0, threads=None,
                    delayed=True, exact=False, degrees=False, broadcast=None)
    if args.config:
        try:
            raw = read_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        for key, value in raw.items():
            if key not in SIM_KEYS:
                raise UsageError(f"unknown config key {key!r}")
            try:
                settings["n" if key == "n_pulses" else key] = SIM_KEYS[key](value)
            except ValueError:
                raise UsageError(f"bad value for {key}: {value!r}") from None
    for key in settings:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    return settings


def cmd_simulate(args):
    s = sim_settings(args)
    try:
        eve = EveStrategy.parse(s["eve"], degrees=s["degrees"])
        cfg = SimConfig(s["n"], s["seed"], s["protocol"], eve, s["delayed"], s["threads"], s["exact"])
        spec = None
        if s["broadcast"]:
            if eve.kind != "none":
                raise ValueError("--broadcast replaces Eve; leave --eve at none")
            spec = ClonerSpec(s["broadcast"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if spec is None:
        fields = report_fields(cfg, run(cfg))
    else:
        res = broadcast_sim(cfg, spec)
        fields = {}
        for who, r in (("bob1", res.bob1), ("bob2", res.bob2)):
            for k, v in report_fields(cfg, r).items():
                if not k.startswith("config_"):
                    fields[f"{who}_{k}"] = v
        fields["bob_covariance"] = res.bob_covariance
        fields["bob_covariance_stderr"] = res.bob_covariance_stderr
        fields.update({k: v for k, v in report_fields(cfg, res.bob1).items() if k.startswith("config_")})
        fields["config_broadcast"] = spec.kind
    _emit(to_json(fields), args.out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="qeve", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    curve = sub.add_parser("curve", help="sweep one quantity over a grid and write CSV")
    curve.add_argument("quantity", choices=QUANTITIES)
    curve.add_argument("--min", type=float, required=True)
    curve.add_argument("--max", type=float, required=True)
    curve.add_argument("--steps", type=int, default=11)
    curve.add_argument("--degrees", action="store_true", help="angles in degrees")
    curve.add_argument("--symmetrized", action="store_true")
    curve.add_argument("--cloner", choices=CLONER_KINDS, default="pgqcm")
    curve.add_argument("--alpha", type=float, default=None, help="copier angle")
    curve.add_argument("--out", default=None)
    curve.set_defaults(func=cmd_curve)

    verify = sub.add_parser("verify", help="check every reference number, exit 1 on any failure")
    verify.add_argument("--out", default=None)
    verify.set_defaults(func=cmd_verify)

    sim = sub.add_parser("simulate", help="Monte-Carlo session, JSON report")
    sim.add_argument("--config", default=None, help="key = value file; flags override it")
    sim.add_argument("--protocol", choices=("bb84", "ekert"), default=None)
    sim.add_argument("--eve", default=None,
                     help="none | intercept:P | intensity:G[:sym] | general:A:B[:sym|:unsym] | cloner:KIND[:ALPHA]")
    sim.add_argument("--n", type=int, default=None, help="number of pulses")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--threads", type=int, default=None)
    sim.add_argument("--delayed", dest="delayed", action="store_true", default=None,
                     help="Eve measures after the basis announcement (default)")
    sim.add_argument("--immediate", dest="delayed", action="store_false",
                     help="Eve measures in her own basis right away")
    sim.add_argument("--exact", action="store_true", default=None,
                     help="sample sequential collapse instead of the joint table")
    sim.add_argument("--degrees", action="store_true", default=None)
    sim.add_argument("--broadcast", choices=CLONER_KINDS, default=None,
                     help="clone Bob's qubit and report both Bobs")
    sim.add_argument("--out", default=None)
    sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qeve: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"qeve: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
