"""
Command-line front end.

Subcommands ``pattern``, ``marginals``, ``compare`` and ``run`` print CSV
(default) or JSON to standard output or ``--out``. Diagnostics go to
standard error. Exit codes: 0 ok, 2 config error, 3 invalid parameter,
4 invalid run specification.

Every output starts with metadata: the canonical invocation (without
file paths) and every geometry value. Re-running that invocation against
a config holding those values reproduces the output byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .experiment import (
    AliceSetting,
    ConfigError,
    Geometry,
    SpdcState,
    coincidence_rate,
    field_alice_focal,
    field_bob,
    load_geometry,
    path_entangled_state,
    phase_evolved_state,
    screen_layout,
    sweep_pattern,
)
from .hilbert import (
    BipartiteLayout,
    HermitianOperator,
    StateVector,
    tensor_product,
    trace_distance,
)
from .mc import RunConfig, decode_bit, simulate_run, write_event_log
from .measurement import (
    MeasurementRule,
    bob_marginal,
    build_family,
    joint_expectation,
    signal_strength,
)

EXIT_OK, EXIT_CONFIG, EXIT_PARAM, EXIT_RUN = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _num(x) -> str:
    """Data cells: 17 significant digits, which round-trip exactly."""
    if isinstance(x, (bool, np.bool_, int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _meta(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return _num(x)


class Bundle:
    """Tabular output with metadata, rendered as CSV or JSON."""

    def __init__(self, command: str, invocation: list[str], geometry: Geometry | None):
        self.meta: dict = {"tool": "eprsignal", "version": __version__, "command": command,
                           "invocation": " ".join(["eprsignal", command, *invocation])}
        if geometry is not None:
            self.meta["geometry_hash"] = geometry.hash()
            self.meta["geometry"] = geometry.as_dict()
        self.columns: list[str] = []
        self.rows: list[list] = []
        self.summary: dict = {}

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = {"metadata": self.meta, "columns": self.columns,
                   "rows": [[_jsonable(v) for v in r] for r in self.rows],
                   "summary": {k: _jsonable(v) for k, v in self.summary.items()}}
            return json.dumps(doc, indent=1) + "\n"
        out = []
        for k, v in self.meta.items():
            if k == "geometry":
                out.extend(f"# geometry.{gk} = {_meta(gv)}" for gk, gv in v.items())
            else:
                out.append(f"# {k} = {v}")
        out.append(",".join(self.columns))
        out.extend(",".join(_num(v) for v in r) for r in self.rows)
        out.extend(f"# summary.{k} = {_meta(v)}" for k, v in self.summary.items())
        return "\n".join(out) + "\n"


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return v


def _geometry(args) -> Geometry:
    if args.config is None:
        return Geometry()
    try:
        return load_geometry(args.config)
    except ConfigError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from exc
    except (ValueError, TypeError) as exc:
        raise CliError(f"invalid geometry: {exc}", EXIT_PARAM) from exc


def _state(args) -> SpdcState:
    try:
        return SpdcState(args.epsilon)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARAM) from exc


def cmd_pattern(args) -> Bundle:
    geo = _geometry(args)
    try:
        alice = AliceSetting(args.alice)
    except ValueError:
        raise CliError(f"unknown Alice setting {args.alice!r}; choose from "
                       + ", ".join(a.value for a in AliceSetting), EXIT_PARAM)
    state = _state(args)
    try:
        pat = sweep_pattern(state, geo, alice, envelope=args.envelope)
        unit = pat.unit_integral()
        # off-focal singles are the reference flux Bob sees in the other setting
        ref = sweep_pattern(state, geo, AliceSetting.OFFFOCAL_SUM, envelope=args.envelope)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARAM) from exc
    inv = ["--alice", alice.value, "--epsilon", _meta(state.epsilon)]
    if args.envelope:
        inv.append("--envelope")
    b = Bundle("pattern", inv, geo)
    b.meta.update(alice=alice.value, epsilon=_meta(state.epsilon), envelope=int(args.envelope))
    b.columns = ["z_m", "rate_raw", "rate_unit_integral"]
    b.rows = [[z, r, u] for z, r, u in zip(pat.positions, pat.values, unit.values)]
    b.summary = {"integral_raw": pat.integral(),
                 "raw_flux_ratio_to_offfocal_sum": pat.integral() / ref.integral(),
                 "interference_condition_ok": geo.interference_ok}
    return b


def _product_state() -> StateVector:
    a = StateVector([1, 0], ("H", "V"))
    b = StateVector(np.array([1, 1]) / np.sqrt(2), ("H", "V"))
    return tensor_product(a, b)


def cmd_marginals(args) -> Bundle:
    geo = _geometry(args)
    if args.state not in ("entangled", "product"):
        raise CliError(f"unknown state {args.state!r}", EXIT_PARAM)
    psi = path_entangled_state(geo) if args.state == "entangled" else _product_state()
    layout = BipartiteLayout(2, 2)
    rho_f = bob_marginal(MeasurementRule.COHERENT_FOCAL, psi, layout)
    rho_g = bob_marginal(MeasurementRule.VON_NEUMANN_OFF_FOCAL, psi, layout)
    rho_lu = bob_marginal(MeasurementRule.LUEDERS_FOCAL, psi, layout)
    sig = signal_strength(psi, layout)
    b = Bundle("marginals", ["--state", args.state], geo)
    b.meta["state"] = args.state
    b.columns = ["matrix", "row", "col", "re", "im"]
    for name, rho in (("rho_f", rho_f), ("rho_g", rho_g), ("rho_lueders", rho_lu)):
        for i in range(2):
            for j in range(2):
                v = rho.entries[i, j]
                b.rows.append([name, i, j, v.real, v.imag])
    b.summary = {"trace_dist": sig.trace_dist, "helstrom_success": sig.helstrom_success,
                 "trace_dist_lueders": trace_distance(rho_lu, rho_g),
                 "rho_f_max_eigenvalue": float(rho_f.eigenvalues()[-1]),
                 "rho_g_max_eigenvalue": float(rho_g.eigenvalues()[-1])}
    return b


# Unit-mean patterns are O(1); below this both routes are round-off at a
# dark fringe and a ratio would be meaningless.
REL_DEV_FLOOR = 64 * np.finfo(float).eps


def _rel_dev(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), REL_DEV_FLOOR)
    return np.abs(a - b) / scale


def compare_routes(geo: Geometry, state: SpdcState) -> dict:
    """Field-correlation rates against projector expectations on the screen state."""
    if geo.n_bins < 2:
        raise ValueError("comparison needs n_bins >= 2")
    z = geo.z_grid()
    fa = field_alice_focal(geo)
    qo = np.array([coincidence_rate(state, fa, field_bob(geo, zi)) for zi in z])
    psi = phase_evolved_state(geo, "focal", z)
    layout = screen_layout(z.size)
    coherent = build_family(MeasurementRule.COHERENT_FOCAL).projectors[0]
    lueders = build_family(MeasurementRule.LUEDERS_FOCAL).projectors[0]
    qm_c = np.empty(z.size)
    qm_l = np.empty(z.size)
    for i in range(z.size):
        pz = HermitianOperator.projector(np.eye(z.size)[i])
        qm_c[i] = joint_expectation(coherent, pz, psi, layout)
        qm_l[i] = joint_expectation(lueders, pz, psi, layout)
    qo_u, qm_u = qo / qo.mean(), qm_c / qm_c.mean()
    dev = _rel_dev(qo_u, qm_u)
    return {"z": z, "qo": qo, "qm_coherent": qm_c, "qm_lueders": qm_l,
            "qo_unit_mean": qo_u, "qm_coherent_unit_mean": qm_u, "rel_dev": dev,
            "max_rel_dev": float(dev.max()),
            "lueders_flatness": float(qm_l.max() / qm_l.min() - 1.0)}


def cmd_compare(args) -> Bundle:
    geo = _geometry(args)
    state = _state(args)
    try:
        res = compare_routes(geo, state)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARAM) from exc
    b = Bundle("compare", ["--epsilon", _meta(state.epsilon)], geo)
    b.meta["epsilon"] = _meta(state.epsilon)
    b.columns = ["z_m", "qo_rate", "qm_coherent", "qm_lueders",
                 "qo_unit_mean", "qm_coherent_unit_mean", "rel_dev"]
    b.rows = [list(r) for r in zip(res["z"], res["qo"], res["qm_coherent"], res["qm_lueders"],
                                   res["qo_unit_mean"], res["qm_coherent_unit_mean"],
                                   res["rel_dev"])]
    b.summary = {"max_rel_dev": res["max_rel_dev"], "lueders_flatness": res["lueders_flatness"]}
    return b


def _parse_int(text, name, lo, hi=None) -> int:
    try:
        v = int(text, 0) if isinstance(text, str) else int(text)
    except (TypeError, ValueError):
        raise CliError(f"{name} must be an integer, got {text!r}", EXIT_RUN)
    if v < lo or (hi is not None and v >= hi):
        raise CliError(f"{name} out of range: {v}", EXIT_RUN)
    return v


def cmd_run(args) -> Bundle:
    geo = _geometry(args)
    try:
        rule = MeasurementRule(args.rule)
    except ValueError:
        raise CliError(f"unknown rule {args.rule!r}; choose from "
                       + ", ".join(r.value for r in MeasurementRule), EXIT_RUN)
    seed = _parse_int(args.seed, "seed", 0, 2 ** 64)
    n_events = _parse_int(args.events, "events", 1)
    trials = _parse_int(args.trials, "trials", 1)
    if not 0.0 < args.threshold < 1.0:
        raise CliError("threshold must lie in (0, 1)", EXIT_RUN)
    try:
        cfg = RunConfig(n_events, seed, rule, geo, args.background, args.efficiency)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_RUN) from exc
    log_dir = Path(args.log_dir) if args.log_dir else None
    if log_dir is not None:
        log_dir.mkdir(parents=True, exist_ok=True)

    true_bit = int(rule.focal)
    b = Bundle("run", ["--rule", rule.value, "--seed", str(seed), "--events", str(n_events),
                       "--trials", str(trials), "--threshold", _meta(args.threshold),
                       "--background", _meta(args.background),
                       "--efficiency", _meta(args.efficiency)], geo)
    b.meta.update(seed=seed, rule=rule.value, n_events=n_events, trials=trials,
                  prng="PCG64 via SeedSequence(seed, spawn_key=(trial,))")
    b.columns = ["trial", "true_bit", "decoded_bit", "visibility", "visibility_std_error",
                 "n_detected", "low_confidence"]
    errors = zeros = 0
    for t in range(trials):
        events = simulate_run(cfg, t)
        if log_dir is not None:
            write_event_log(log_dir / f"events_{rule.value}_seed{seed}_trial{t:05d}.csv",
                            events, cfg, t)
        dec = decode_bit(events, args.threshold, geo.n_bins)
        errors += dec.bit != true_bit
        zeros += dec.bit == 0
        b.rows.append([t, true_bit, dec.bit, dec.v.v, dec.v.std_error, len(events),
                       dec.low_confidence])
    b.summary = {"bit_error_rate": errors / trials, "fraction_decoded_zero": zeros / trials}
    return b


COMMANDS = {"pattern": cmd_pattern, "marginals": cmd_marginals,
            "compare": cmd_compare, "run": cmd_run}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eprsignal", description=__doc__.split("\n\n")[0].strip())
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="geometry file (key = value, SI units)")
        sp.add_argument("--format", default="csv", help="csv or json")
        sp.add_argument("--out", help="write here instead of standard output")

    sp = sub.add_parser("pattern", help="analytic coincidence pattern on Bob's screen")
    common(sp)
    sp.add_argument("--alice", default="focal",
                    help="focal, offfocal_l, offfocal_m or offfocal_sum")
    sp.add_argument("--epsilon", type=float, default=0.1)
    sp.add_argument("--envelope", action="store_true", help="apply single-slit sinc^2 envelope")

    sp = sub.add_parser("marginals", help="Bob's reduced states under each rule")
    common(sp)
    sp.add_argument("--state", default="entangled", help="entangled or product")

    sp = sub.add_parser("compare", help="field-correlation vs projector route, bin by bin")
    common(sp)
    sp.add_argument("--epsilon", type=float, default=0.1)

    sp = sub.add_parser("run", help="Monte Carlo trials and Bob's decoded bit")
    common(sp)
    sp.add_argument("--rule", default=MeasurementRule.COHERENT_FOCAL.value)
    sp.add_argument("--seed", default="1")
    sp.add_argument("--events", default="1000")
    sp.add_argument("--trials", default="1")
    sp.add_argument("--threshold", type=float, default=0.5)
    sp.add_argument("--background", type=float, default=0.0)
    sp.add_argument("--efficiency", type=float, default=1.0)
    sp.add_argument("--log-dir", help="persist one event log per trial here")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.format not in ("csv", "json"):
            raise CliError(f"unknown format {args.format!r}", EXIT_PARAM)
        text = COMMANDS[args.command](args).render(args.format)
    except CliError as exc:
        print(f"eprsignal {args.command}: {exc}", file=sys.stderr)
        return exc.code
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
