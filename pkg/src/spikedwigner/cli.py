"""Command-line front end: limit-law evaluation, combinatorial verification,
and seeded Monte Carlo runs with CSV/JSON/figure outputs.

Exit codes: 0 success, 1 runtime or numeric failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from datetime import datetime, timezone
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional

import jsonschema

from . import __version__
from . import combinat as cb
from . import limits as lm
from . import montecarlo as mc
from . import plots

_TOLERANCE_NOTE = ("all Monte Carlo tolerances are finite-n implementation choices; "
                   "the limit theorems carry no rates")


# --------------------------------------------------------------------------- #
# output helpers
# --------------------------------------------------------------------------- #

def _schema(name: str) -> Dict:
    with resources.files("spikedwigner").joinpath(f"schemas/{name}").open("r") as fh:
        return json.load(fh)


def validate_output(name: str, obj: Dict) -> Dict:
    """Validate obj against the shipped schema; returns obj unchanged."""
    jsonschema.validate(obj, _schema(name))
    return obj


def _emit(name: str, obj: Dict) -> None:
    validate_output(name, obj)
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _run_id(kind: str, config: Dict) -> str:
    blob = json.dumps({"kind": kind, "config": config, "version": __version__},
                      sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


# --------------------------------------------------------------------------- #
# limits subcommand
# --------------------------------------------------------------------------- #

def _need(args, *names: str) -> List[float]:
    vals = []
    for name in names:
        v = getattr(args, name.replace("-", "_"))
        if v is None:
            raise ValueError(f"--fn {args.fn} requires --{name}")
        vals.append(v)
    return vals


def _cmd_limits_eval(args) -> int:
    fn = args.fn
    out: Dict = {"fn": fn, "bracket": None, "residual": None, "inner_root": None}
    if fn == "f":
        (x,) = _need(args, "x")
        out["value"] = lm.f_bbp(x)
    elif fn == "f_inv":
        (y,) = _need(args, "y")
        out["value"] = lm.f_inverse_upper(y)
    elif fn == "E_cdf":
        alpha, x = _need(args, "alpha", "x")
        out["value"] = lm.frechet_E_cdf(alpha, x)
    elif fn == "zeta_cdf":
        c, x = _need(args, "c", "x")
        out["value"] = lm.zeta_cdf(c, x)
    elif fn == "f_zeta_cdf":
        c, y = _need(args, "c", "y")
        out["value"] = lm.f_zeta_cdf(c, y)
    elif fn == "thm1cdf":
        theta, alpha, y = _need(args, "theta", "alpha", "y")
        out["value"] = lm.thm1_cdf(theta, alpha, y)
    elif fn == "thm2cdf":
        theta, c, fest, y = _need(args, "theta", "c", "f-estimate", "y")
        out["value"] = lm.thm2_cdf(theta, c, fest, y)
    elif fn == "thm3cdf":
        theta, c, y = _need(args, "theta", "c", "y")
        out["value"] = lm.thm3_cdf(theta, c, y)
    elif fn in ("G1", "G2"):
        (theta,) = _need(args, "theta")
        res = (lm.G1 if fn == "G1" else lm.G2)(theta)
        out.update(value=res.value, inner_root=res.inner_root, residual=res.residual)
    elif fn in ("sup_h", "sup_h1", "sup_h2"):
        (theta,) = _need(args, "theta")
        out["value"] = getattr(lm, fn)(theta)
    else:  # pragma: no cover - argparse choices guard this
        raise ValueError(f"unknown function {fn!r}")
    _emit("limits_eval.json", out)
    return 0


def _cmd_limits_estimate_f(args) -> int:
    est = lm.estimate_F(args.theta, args.pmax)
    residual = max(lm.G1(args.theta).residual, lm.G2(args.theta).residual)
    _emit("limits_estimate_f.json", {
        "theta": args.theta,
        "p_max": args.pmax,
        "value": est.value,
        "bracket": list(est.bracket),
        "sequence": [[p, v] for p, v in est.points],
        "residual": residual,
    })
    return 0


# --------------------------------------------------------------------------- #
# comb subcommand
# --------------------------------------------------------------------------- #

def _cmd_comb_verify(args) -> int:
    max_l = args.max_l
    if not (1 <= max_l <= cb.CYCLE_CAP):
        raise ValueError(f"--max-l must lie in [1, {cb.CYCLE_CAP}]")
    identity = all(cb.verify_shift_identity(l, s)
                   for l in range(1, max_l + 1) for s in range(1, l + 1))
    bounds = True
    for l in range(1, max_l + 1):
        for s in range(1, 13):
            rep = cb.verify_conv_bounds(l, s)
            if not rep.upper_bound_ok or rep.lower_bound_ok is False:
                bounds = False
    totals = True
    mult = True
    for l in range(1, max_l + 1):
        totals &= cb.enumerate_cycle_classes(l).totals_ok()
        mult &= cb.verify_multiplicity_bounds(l).all_ok
    _emit("comb_verify.json", {
        "max_l": max_l,
        "catalan_shift_identity": "pass" if identity else "fail",
        "convolution_bounds": "pass" if bounds else "fail",
        "multiplicity_bounds": "pass" if mult else "fail",
        "cycle_totals": "pass" if totals else "fail",
    })
    return 0


def _cmd_comb_btable(args) -> int:
    table = cb.enumerate_cycle_classes(args.l)
    _emit("comb_btable.json", {
        "l": args.l,
        "b": {str(t): c for t, c in table.b.items()},
        "catalan": table.class_count,
    })
    return 0


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _emit_exact(op: str, value: Fraction, **extra) -> None:
    out = {"op": op, "value": float(value), "exact": str(value), "log_value": None}
    out.update(extra)
    _emit("comb_value.json", out)


def _cmd_comb_scalar(args) -> int:
    if args.comb_op == "catalan":
        _emit_exact("catalan", Fraction(cb.catalan(args.l)))
    elif args.comb_op == "sigma":
        _emit_exact("sigma", Fraction(cb.sigma_conv(args.l, args.s)))
    elif args.comb_op == "s1":
        if args.log:
            logv = cb.log_s1(float(args.theta), args.p)
            val = math.exp(logv) if logv < 700 else math.inf
            _emit("comb_value.json", {"op": "s1", "value": val, "exact": None,
                                      "log_value": logv})
        else:
            _emit_exact("s1", cb.s1(args.theta, args.p))
    elif args.comb_op == "s2":
        if args.proxy:
            _emit("comb_value.json", {"op": "s2", "value": cb.s2_proxy(float(args.theta), args.p),
                                      "exact": None, "estimate": True, "log_value": None})
        else:
            _emit_exact("s2", cb.s2(args.theta, args.p))
    elif args.comb_op == "sm":
        _emit_exact("sm", cb.s_of_M(args.p, args.M))
    else:  # pragma: no cover
        raise ValueError(f"unknown comb op {args.comb_op!r}")
    return 0


# --------------------------------------------------------------------------- #
# simulate / sweep subcommands
# --------------------------------------------------------------------------- #

def _experiment_config(args) -> mc.ExperimentConfig:
    if args.config is not None:
        cfg = json.loads(Path(args.config).read_text())
        if args.seed is not None:
            cfg["master_seed"] = args.seed
        return mc.ExperimentConfig.from_config(cfg)
    if args.family is None:
        raise ValueError("either --config or --family/--n-list/... flags are required")
    law_cfg = {"family": args.family}
    if args.family == "pareto":
        if args.alpha is None:
            raise ValueError("--family pareto requires --alpha")
        law_cfg.update(alpha=args.alpha, scale=args.scale)
    spike_cfg: Dict = {"kind": args.spike}
    if args.spike == "basis":
        spike_cfg["index"] = args.spike_index
    elif args.spike == "head":
        spike_cfg["k"] = args.spike_k
    cfg = {
        "law": law_cfg,
        "spike": spike_cfg,
        "theta": args.theta,
        "n_list": [int(tok) for tok in args.n_list.split(",")],
        "trials": args.trials,
        "master_seed": args.seed if args.seed is not None else 0,
    }
    config = mc.ExperimentConfig.from_config(cfg)
    target = _default_target(config, args.f_estimate) if args.target == "auto" else None
    if args.target in ("thm1", "thm2", "thm3"):
        target = _named_target(args.target, config, args.f_estimate)
    if target is not None:
        config = mc.ExperimentConfig.from_config({**config.as_config(),
                                                  "target": target.as_config()})
    return config


def _named_target(kind: str, config: mc.ExperimentConfig,
                  f_estimate: Optional[float]) -> lm.LimitLaw:
    theta = config.theta
    if kind == "thm1":
        return lm.LimitLaw.make("thm1", theta=theta, alpha=config.law.alpha)
    c = config.law.tail_constant()
    if kind == "thm3":
        return lm.LimitLaw.make("thm3", theta=theta, c=c)
    if f_estimate is None:
        if theta > 1.0:
            raise ValueError("thm2 target with theta > 1 needs --f-estimate "
                             "(F is only bracketed; see limits estimate-F)")
        f_estimate = 2.0
    return lm.LimitLaw.make("thm2", theta=theta, c=c, f_estimate=f_estimate)


def _default_target(config: mc.ExperimentConfig,
                    f_estimate: Optional[float]) -> Optional[lm.LimitLaw]:
    model = config.model_for(config.n_list[0])
    if model.scaling == "b_n":
        return _named_target("thm1", config, f_estimate)
    localized = config.spike.kind in ("basis", "head")
    try:
        return _named_target("thm3" if localized else "thm2", config, f_estimate)
    except ValueError:
        return None


def _summaries(config: mc.ExperimentConfig, records) -> List[Dict]:
    params = {"theta": config.theta, "law": config.as_config()["law"],
              "spike": config.spike.as_config(), "scaling": config.scaling,
              "master_seed": config.master_seed}
    rows = []
    for n in config.n_list:
        lam = [r.lambda1 for r in records if r.n == n]
        maxa = [r.maxA for r in records if r.n == n]
        rows.append({
            "n": n,
            "trials": len(lam),
            "ks": None if config.target is None else mc.ks_distance(lam, config.target.cdf),
            "median_lambda1": mc.quantile(lam, 0.5),
            "median_maxA": mc.quantile(maxa, 0.5),
            "target_law": None if config.target is None else config.target.as_config(),
            "params": params,
        })
    return rows


def _write_manifest(out_dir: Path, run_id: str, command: str, config: Dict,
                    outputs: List[str]) -> Path:
    manifest = {
        "manifest_id": run_id,
        "command": command,
        "config": config,
        "code_version": __version__,
        "master_seed": int(config["master_seed"]),
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "outputs": outputs,
    }
    validate_output("manifest.json", manifest)
    path = out_dir / f"{run_id}_manifest.json"
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return path


def _cmd_simulate(args, command: str, sweep: bool) -> int:
    config = _experiment_config(args)
    cfg_echo = config.as_config()
    run_id = _run_id("sweep" if sweep else "simulate", cfg_echo)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    records = mc.run_experiment(config, threads=args.threads)
    outputs: List[str] = []

    csv_path = out_dir / f"{run_id}_trials.csv"
    csv_path.write_text(mc.trials_csv_text(records, run_id, timing=args.timing))
    outputs.append(csv_path.name)

    rows = _summaries(config, records)
    summary = {"run_id": run_id, "config": cfg_echo, "summaries": rows,
               "tolerance_note": _TOLERANCE_NOTE}
    validate_output("summary.json", summary)
    summary_path = out_dir / f"{run_id}_summary.json"
    summary_path.write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
    outputs.append(summary_path.name)

    if sweep:
        if len(config.n_list) < 2:
            raise ValueError("sweep needs at least two dimensions in n_list")
        sweep_path = out_dir / f"{run_id}_sweep.csv"
        lines = ["n,trials,ks,median_lambda1,median_maxA"]
        for row in rows:
            ks = "" if row["ks"] is None else repr(row["ks"])
            lines.append(f"{row['n']},{row['trials']},{ks},"
                         f"{row['median_lambda1']!r},{row['median_maxA']!r}")
        sweep_path.write_text("\n".join(lines) + "\n")
        outputs.append(sweep_path.name)

    if not args.no_figures:
        fig_path = out_dir / f"{run_id}_lambda1_cdf.png"
        plots.ecdf_figure(records, config.target, fig_path, run_id)
        outputs.append(fig_path.name)
        if sweep and config.target is not None:
            ks_path = out_dir / f"{run_id}_ks_sweep.png"
            plots.ks_sweep_figure(rows, ks_path, run_id)
            outputs.append(ks_path.name)

    _write_manifest(out_dir, run_id, command, cfg_echo, outputs)
    _emit("run_result.json", {"run_id": run_id, "outputs": outputs})
    return 0


# --------------------------------------------------------------------------- #
# parser
# --------------------------------------------------------------------------- #

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spikedwigner",
        description="Spiked heavy-tailed Wigner laboratory: limit laws, exact "
                    "combinatorics, and seeded Monte Carlo experiments.")
    p.add_argument("--seed", type=int, default=None, help="master seed override")
    p.add_argument("--threads", type=int, default=1, help="worker threads for trials")
    p.add_argument("--out", default=".", help="output directory for data files")
    p.add_argument("--config", default=None, help="experiment config JSON file")
    sub = p.add_subparsers(dest="command", required=True)

    lim = sub.add_parser("limits", help="evaluate limit laws and edge functions")
    lim_sub = lim.add_subparsers(dest="limits_op", required=True)
    ev = lim_sub.add_parser("eval", help="evaluate one function")
    ev.add_argument("--fn", required=True,
                    choices=["f", "f_inv", "E_cdf", "zeta_cdf", "f_zeta_cdf",
                             "thm1cdf", "thm2cdf", "thm3cdf",
                             "G1", "G2", "sup_h", "sup_h1", "sup_h2"])
    for flag in ("--x", "--y", "--theta", "--alpha", "--c", "--f-estimate"):
        ev.add_argument(flag, type=float, default=None)
    ef = lim_sub.add_parser("estimate-F", help="finite-p sequence and bracket for F")
    ef.add_argument("--theta", type=float, required=True)
    ef.add_argument("--pmax", type=int, default=300)

    comb = sub.add_parser("comb", help="exact combinatorial tables and checks")
    comb_sub = comb.add_subparsers(dest="comb_op", required=True)
    cv = comb_sub.add_parser("verify", help="run the exact verification suites")
    cv.add_argument("--max-l", type=int, default=8, dest="max_l")
    bt = comb_sub.add_parser("btable", help="vertex multiplicity census at half-length l")
    bt.add_argument("--l", type=int, required=True)
    cat = comb_sub.add_parser("catalan", help="Catalan number")
    cat.add_argument("--l", type=int, required=True)
    sg = comb_sub.add_parser("sigma", help="Catalan convolution power")
    sg.add_argument("--l", type=int, required=True)
    sg.add_argument("--s", type=int, required=True)
    s1p = comb_sub.add_parser("s1", help="delocalized-spike generating sum")
    s1p.add_argument("--theta", type=_fraction_arg, required=True)
    s1p.add_argument("--p", type=int, required=True)
    s1p.add_argument("--log", action="store_true", help="log-space evaluation")
    s2p = comb_sub.add_parser("s2", help="localized-spike generating sum")
    s2p.add_argument("--theta", type=_fraction_arg, required=True)
    s2p.add_argument("--p", type=int, required=True)
    s2p.add_argument("--proxy", action="store_true",
                     help="binomial-proxy estimate beyond the exact census cap")
    smp = comb_sub.add_parser("sm", help="conditional trace-difference sum s(p, M)")
    smp.add_argument("--p", type=int, required=True)
    smp.add_argument("--M", type=_fraction_arg, required=True)

    for name, hlp in (("simulate", "run trials and write CSV/JSON/figures"),
                      ("sweep", "run trials across n and report KS vs n")):
        sp = sub.add_parser(name, help=hlp)
        sp.add_argument("--family", choices=["pareto", "pareto4_unitvar"], default=None)
        sp.add_argument("--alpha", type=float, default=None)
        sp.add_argument("--scale", type=float, default=1.0)
        sp.add_argument("--spike", choices=["basis", "uniform", "head"], default="uniform")
        sp.add_argument("--spike-index", type=int, default=1)
        sp.add_argument("--spike-k", type=int, default=1)
        sp.add_argument("--theta", type=float, default=0.0)
        sp.add_argument("--n-list", default="200", help="comma-separated dimensions")
        sp.add_argument("--trials", type=int, default=10)
        sp.add_argument("--target", choices=["auto", "thm1", "thm2", "thm3", "none"],
                        default="auto")
        sp.add_argument("--f-estimate", type=float, default=None,
                        help="value of F(theta) for the thm2 target")
        sp.add_argument("--timing", choices=["measured", "zero"], default="measured",
                        help="'zero' makes CSV outputs byte-identical across reruns")
        sp.add_argument("--no-figures", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = " ".join(sys.argv[1:] if argv is None else list(argv))
    try:
        if args.command == "limits":
            if args.limits_op == "eval":
                return _cmd_limits_eval(args)
            return _cmd_limits_estimate_f(args)
        if args.command == "comb":
            if args.comb_op == "verify":
                return _cmd_comb_verify(args)
            if args.comb_op == "btable":
                return _cmd_comb_btable(args)
            return _cmd_comb_scalar(args)
        if args.command == "simulate":
            return _cmd_simulate(args, command, sweep=False)
        if args.command == "sweep":
            return _cmd_simulate(args, command, sweep=True)
        raise ValueError(f"unknown command {args.command!r}")  # pragma: no cover
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, ArithmeticError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
