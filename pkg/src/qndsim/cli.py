"""Command-line front end.

Subcommands:
  fidelity    compute the three QND fidelities from outcome distributions
  cnot-sweep  characterize the CNOT QND gate over a strength grid
  optics      simulate the post-selected linear-optical gate
  weak        post-selected weak/strong values, analytic or sampled

Parameters come from a JSON config file (``--config``) and/or flags;
flags override the file. Reports echo the fully resolved config so a run
can be reproduced from its own output. Errors are emitted as a JSON
object {"error": ..., "field": ...} on stderr with a nonzero exit code.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, cnot_qnd, metrics, photonics, weakval
from .hilbert import PureState


class CliError(Exception):
    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


def _parse_dist(text: str, field: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise CliError(f"could not parse distribution: {exc}", field)
    if not values:
        raise CliError("empty distribution", field)
    return values


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"could not read config file: {exc}", "config")
    if not isinstance(cfg, dict):
        raise CliError("config file must contain a JSON object", "config")
    return cfg


def _resolve(cfg: dict, args: argparse.Namespace, keys: list[str]) -> dict:
    """Merge config-file values with flags; flags win when given."""
    out = {}
    for key in keys:
        flag = getattr(args, key.replace("-", "_"), None)
        out[key] = flag if flag is not None else cfg.get(key)
    return out


def _emit(report: dict, args: argparse.Namespace, csv_text: str | None = None) -> None:
    fmt = getattr(args, "format", None) or "json"
    if fmt == "csv" and csv_text is not None:
        text = csv_text
    else:
        text = json.dumps(report, indent=2)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    print(text)


def _report(config: dict, results: dict, started: float) -> dict:
    return {
        "config": config,
        "version": __version__,
        "duration_s": time.monotonic() - started,
        "results": results,
    }


def cmd_fidelity(args: argparse.Namespace) -> int:
    started = time.monotonic()
    cfg = _load_config(args.config)
    params = _resolve(cfg, args, ["p_in", "p_m", "p_out", "conditionals", "counts_file"])
    if params["counts_file"]:
        try:
            with open(params["counts_file"]) as fh:
                counts = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"could not read counts file: {exc}", "counts_file")
        for key in ("p_in", "p_m", "p_out", "conditionals"):
            if params[key] is None and key in counts:
                params[key] = counts[key]

    def dist(key):
        v = params[key]
        if v is None:
            return None
        if isinstance(v, str):
            v = _parse_dist(v, key)
        try:
            return [float(x) for x in v]
        except (TypeError, ValueError):
            raise CliError(f"malformed distribution for {key}", key)

    p_in, p_m, p_out, cond = dist("p_in"), dist("p_m"), dist("p_out"), dist("conditionals")
    if p_in is None:
        raise CliError("p_in is required", "p_in")
    results = {}
    try:
        if p_m is not None:
            results["f_m"] = metrics.measurement_fidelity(p_in, p_m)
        if p_out is not None:
            results["f_qnd"] = metrics.qnd_fidelity(p_in, p_out)
        if cond is not None:
            if p_m is None:
                raise CliError("conditionals require p_m", "p_m")
            results["f_qsp"] = metrics.qsp_fidelity(p_m, cond)
    except (metrics.MetricsError, ValueError) as exc:
        raise CliError(str(exc), None)
    if not results:
        raise CliError("provide at least one of p_m, p_out", "p_m")
    config = {k: v for k, v in params.items() if v is not None}
    _emit(_report(config, results, started), args)
    return 0


def _gamma_grid(params: dict) -> list[float]:
    if params.get("gamma") is not None:
        return [float(params["gamma"])]
    n = int(params.get("gamma_points") or 11)
    if n < 1:
        raise CliError("gamma_points must be >= 1", "gamma_points")
    lo, hi = cnot_qnd.GAMMA_MIN, 1.0
    if n == 1:
        return [hi]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def cmd_cnot_sweep(args: argparse.Namespace) -> int:
    started = time.monotonic()
    cfg = _load_config(args.config)
    params = _resolve(cfg, args, ["gamma", "gamma_points"])
    grid = _gamma_grid(params)
    try:
        rows = cnot_qnd.strength_sweep(grid)
    except cnot_qnd.StrengthError as exc:
        raise CliError(str(exc), "gamma")
    config = {"gamma_grid": grid}
    report = _report(config, {"rows": cnot_qnd.sweep_to_json(rows)}, started)
    _emit(report, args, csv_text=cnot_qnd.sweep_to_csv(rows))
    return 0


def cmd_optics(args: argparse.Namespace) -> int:
    started = time.monotonic()
    cfg = _load_config(args.config)
    params = _resolve(
        cfg, args, ["signal", "alpha", "beta", "eta", "strength_a", "loss"]
    )
    eta = float(params["eta"]) if params["eta"] is not None else 1.0 / 3.0
    loss = bool(params["loss"])
    if params["signal"] is not None:
        label = str(params["signal"]).upper()
        if label not in ("H", "V"):
            raise CliError(f"signal must be H or V, got {params['signal']}", "signal")
        signal = PureState((2,), [1, 0] if label == "H" else [0, 1])
    else:
        alpha = float(params["alpha"]) if params["alpha"] is not None else 1.0
        beta = float(params["beta"]) if params["beta"] is not None else 0.0
        try:
            signal = PureState.from_amplitudes([alpha, beta], dims=(2,))
        except ValueError as exc:
            raise CliError(str(exc), "alpha")
    try:
        if params["strength_a"] is not None:
            a = float(params["strength_a"])
            meter = photonics.meter_prep_strength(a)
            loss = True  # the variable-strength regime needs the balancing loss
        else:
            meter = photonics.meter_prep(eta)
        result = photonics.run_gate(signal, meter, eta, include_signal_loss=loss)
    except photonics.PhotonicsError as exc:
        raise CliError(str(exc), "eta")

    results = result.to_json()
    # post-selected signal/meter correlation, averaged over eigenstate inputs
    q = np.zeros((2, 2))
    for i, pol in enumerate((PureState((2,), [1, 0]), PureState((2,), [0, 1]))):
        r = photonics.run_gate(pol, meter, eta, include_signal_loss=loss)
        if r.conditional_joint is not None:
            q += 0.5 * np.abs(r.conditional_joint.amps.reshape(2, 2)) ** 2
    results["c2"] = metrics.correlation_c2(
        metrics.JointDist(q, eigvals_a=[1, -1], eigvals_b=[1, -1])
    )
    config = {
        "eta": eta,
        "loss": loss,
        "signal": signal.to_json(),
        "meter": meter.to_json(),
        "strength_a": params["strength_a"],
    }
    _emit(_report(config, results, started), args)
    return 0


def cmd_weak(args: argparse.Namespace) -> int:
    started = time.monotonic()
    cfg = _load_config(args.config)
    params = _resolve(
        cfg, args, ["alpha", "beta", "gamma", "shots", "analytic", "bound"]
    )
    alpha = float(params["alpha"]) if params["alpha"] is not None else None
    if alpha is None:
        raise CliError("alpha is required", "alpha")
    results: dict = {}
    try:
        if params["bound"]:
            results["gamma_max"] = weakval.negativity_gamma_bound(alpha)
        else:
            beta = float(params["beta"]) if params["beta"] is not None else None
            gamma = float(params["gamma"]) if params["gamma"] is not None else None
            if beta is None or gamma is None:
                raise CliError("beta and gamma are required", "gamma")
            plus, minus, p_plus = weakval.postselected_mean_n(alpha, beta, gamma)
            results["analytic"] = {
                "plus_value": plus,
                "minus_value": minus,
                "p_plus": p_plus,
            }
            shots = params["shots"]
            if shots and not params["analytic"]:
                if args.seed is None and cfg.get("seed") is None:
                    raise CliError("seed is required when sampling", "seed")
                seed = args.seed if args.seed is not None else int(cfg["seed"])
                sampled = weakval.estimate_sampled(alpha, beta, gamma, int(shots), seed)
                results["sampled"] = sampled.to_json()
    except weakval.WeakValueError as exc:
        raise CliError(str(exc), "gamma")
    except cnot_qnd.StrengthError as exc:
        raise CliError(str(exc), "gamma")
    config = {k: v for k, v in params.items() if v is not None}
    if args.seed is not None:
        config["seed"] = args.seed
    _emit(_report(config, results, started), args)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override it")
    common.add_argument("--out", help="write the report to this path as well")
    common.add_argument("--format", choices=["json", "csv"], help="output format")
    common.add_argument("--seed", type=int, help="RNG seed for sampled runs")

    parser = argparse.ArgumentParser(prog="qndsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fidelity", parents=[common], help="fidelities from distributions")
    p.add_argument("--p-in", help="comma-separated weights of the input distribution")
    p.add_argument("--p-m", help="meter outcome distribution")
    p.add_argument("--p-out", help="signal output distribution")
    p.add_argument("--conditionals", help="per-outcome conditional probabilities")
    p.add_argument("--counts-file", help="JSON file with raw counts per distribution")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("cnot-sweep", parents=[common], help="strength sweep of the CNOT QND gate")
    p.add_argument("--gamma", type=float, help="single strength instead of a grid")
    p.add_argument("--gamma-points", type=int, help="grid size over [1/sqrt(2), 1]")
    p.set_defaults(func=cmd_cnot_sweep)

    p = sub.add_parser("optics", parents=[common], help="post-selected optical QND gate")
    p.add_argument("--signal", help="eigenstate signal: H or V")
    p.add_argument("--alpha", type=float, help="signal H amplitude")
    p.add_argument("--beta", type=float, help="signal V amplitude")
    p.add_argument("--eta", type=float, help="beamsplitter reflectivity (default 1/3)")
    p.add_argument("--strength-a", type=float, help="meter strength a in [0, sqrt(3)/2]")
    p.add_argument("--loss", action="store_const", const=True, help="include the 2/3 balancing loss")
    p.set_defaults(func=cmd_optics)

    p = sub.add_parser("weak", parents=[common], help="post-selected weak values")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--shots", type=int, help="Monte-Carlo shots (requires --seed)")
    p.add_argument("--analytic", action="store_const", const=True, help="closed form only")
    p.add_argument("--bound", action="store_const", const=True, help="negativity bound on gamma")
    p.set_defaults(func=cmd_weak)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(json.dumps({"error": str(exc), "field": exc.field}), file=sys.stderr)
        return 2
    except Exception as exc:  # invariant breach inside a module
        print(json.dumps({"error": str(exc), "field": None}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
