"""
Command Line Interface
Single ``wdlearn`` entry point with one subcommand per workflow. Every run
resolves flags over an optional key=value config file, writes its artifacts
under --out-dir and records the resolved configuration in manifest.txt.
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from . import __version__
from .bounds import bound_inputs_from_mapping, evaluate_bounds
from .config import (
    MANIFEST_VERSION, RNG_ALGORITHM, DEFAULT_BURN_IN, DEFAULT_HIDDEN_LAYERS, DEFAULT_HIDDEN_WIDTH,
    DEFAULT_HIDDEN_ACTIVATION, DEFAULT_OUTPUT_ACTIVATION, DEFAULT_LEARNING_RATE, DEFAULT_BATCH_SIZE,
    DEFAULT_PATIENCE_EPOCHS, DEFAULT_MAX_EPOCHS, DEFAULT_LOSS, DEFAULT_TARGET_M, DEFAULT_A3_K_MAX,
    DEFAULT_ENVELOPE_J_MAX, USRECQ_FIXTURE, CSV_LINE_TERMINATOR
)
from .erm_training import TrainConfig, empirical_01_risk, train_erm
from .experiments import ExperimentPlan, run_gap_curve
from .kvconfig import parse_bool, parse_int_list, read_key_value_file, write_key_value_file
from .neuralnet import Architecture, write_params_csv
from .process_sim import (
    BinaryDgpSpec, DgpKind, exact_risk_oracle, load_acx_spec, load_binary_spec, make_supervised,
    read_trajectory_csv, simulate_acx, simulate_binary, supervised_layout, transition_frequencies
)
from .recession_app import fetch_usrecq, load_usrecq, median_confusion, run_recession_seeds
from .weak_dependence import (
    CoefficientSequence, a3_witness, tau_table, total_sum, truncation_certificate
)

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.txt"
MANIFEST_METADATA = ("command", "manifest_version", "version", "rng_algorithm")


class UsageError(Exception):
    """Raised by the argument parser instead of exiting"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _flag_bool(text: str) -> bool:
    return parse_bool(text)


def _optional_int(text: str) -> Optional[int]:
    return int(text) if text.strip() else None


@dataclass(frozen=True)
class Option:
    """A resolvable setting: flag value, then config file value, then default"""
    name: str
    parse: Callable[[str], Any]
    default: Any
    help: str = ""

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")


GLOBAL_OPTIONS = [
    Option("seed", int, 0, "master seed of every random stream"),
    Option("out_dir", str, ".", "directory receiving every output file"),
    Option("jobs", int, os.cpu_count() or 1, "worker processes for replication fan-out"),
]

TRAINING_OPTIONS = [
    Option("hidden_layers", int, DEFAULT_HIDDEN_LAYERS, "number of hidden layers"),
    Option("hidden_width", int, DEFAULT_HIDDEN_WIDTH, "units per hidden layer"),
    Option("activation", str, DEFAULT_HIDDEN_ACTIVATION, "hidden activation (relu, sigmoid, tanh)"),
    Option("output_activation", str, DEFAULT_OUTPUT_ACTIVATION, "output activation (identity, tanh)"),
    Option("learning_rate", float, DEFAULT_LEARNING_RATE, "Adam learning rate"),
    Option("batch_size", int, DEFAULT_BATCH_SIZE, "minibatch size"),
    Option("patience", int, DEFAULT_PATIENCE_EPOCHS, "epochs without improvement before stopping"),
    Option("max_epochs", int, DEFAULT_MAX_EPOCHS, "hard epoch limit"),
    Option("loss", str, DEFAULT_LOSS, "surrogate loss (hinge, square)"),
]

COMMAND_OPTIONS: Dict[str, List[Option]] = {
    "simulate": [
        Option("dgp", str, "dgp1", "dgp1, dgp2 or a key=value spec file"),
        Option("acx_spec", str, "", "AC-X spec file; simulates the affine causal model instead"),
        Option("n", int, 1000, "number of retained observations"),
        Option("burn_in", int, DEFAULT_BURN_IN, "discarded initial steps"),
    ],
    "train": [
        Option("dgp", str, "dgp1", "dgp1, dgp2 or a key=value spec file"),
        Option("data", str, "", "trajectory CSV to train on instead of simulating"),
        Option("lag_order", int, 1, "label lags used with --data"),
        Option("n", int, 1000, "training sample size when simulating"),
        Option("test_n", int, 0, "independent test size when simulating (0 means n)"),
        Option("burn_in", int, DEFAULT_BURN_IN, "discarded initial steps"),
    ] + TRAINING_OPTIONS,
    "bounds": [
        Option("n", _optional_int, None, "sample size (required)"),
        Option("M", float, 1.0, "sup-norm bound of the hypotheses"),
        Option("G", float, 1.0, "input domain bound"),
        Option("C_sigma", float, 1.0, "Lipschitz constant of the activation"),
        Option("L1", float, 1.0, "moment constant L1"),
        Option("L2", float, 1.0, "moment constant L2"),
        Option("mu", float, 2.0, "moment exponent mu"),
        Option("psi_kind", str, "theta", "theta, eta, kappa or lambda"),
        Option("C", float, 1.0, "variance proxy"),
        Option("C3", float, 1.0, "second theorem constant"),
        Option("nu", float, 0.5, "nu in (0, 1)"),
        Option("eta", float, 0.05, "confidence level in (0, 1]"),
        Option("alpha", float, 3.0, "alpha > 2"),
        Option("L", int, 1, "network depth bound"),
        Option("N", int, 1, "network width bound"),
        Option("B", float, 1.0, "parameter sup-norm bound"),
        Option("F", float, 1.0, "output sup-norm bound"),
        Option("S", int, 0, "sparsity bound"),
        Option("log_n_variant", _flag_bool, False, "subtract log n instead of log log n"),
    ],
    "depcheck": [
        Option("kind", str, "geometric", "geometric or riemannian"),
        Option("c", float, 0.25, "sequence scale c"),
        Option("a", float, 0.5, "geometric ratio a"),
        Option("gamma", float, 2.0, "Riemannian exponent gamma"),
        Option("j_max", int, DEFAULT_ENVELOPE_J_MAX, "largest j in the tau table"),
        Option("a3", _flag_bool, False, "also run the (A3) moment witness (geometric only)"),
        Option("mu", float, 2.0, "moment exponent for the witness"),
        Option("k_max", int, DEFAULT_A3_K_MAX, "largest moment order for the witness"),
    ],
    "experiment": [
        Option("profile", str, "desk", "desk or paper"),
        Option("dgp", str, "dgp1", "dgp1, dgp2 or a key=value spec file"),
        Option("n_grid", lambda s: parse_int_list(s, "n_grid"), None, "comma separated sample sizes"),
        Option("replications", _optional_int, None, "replications per sample size"),
        Option("target_m", int, DEFAULT_TARGET_M, "sample size of the target network estimate"),
        Option("fixed_test_size", _optional_int, None, "constant test trajectory length"),
        Option("burn_in", int, DEFAULT_BURN_IN, "discarded initial steps"),
    ] + TRAINING_OPTIONS,
    "recession": [
        Option("data", str, USRECQ_FIXTURE, "quarterly indicator CSV"),
        Option("fetch", _flag_bool, False, "download the public series into --out-dir first"),
        Option("seeds", lambda s: parse_int_list(s, "seeds"), (0,), "comma separated training seeds"),
    ] + TRAINING_OPTIONS,
    "oracle": [
        Option("dgp", str, "dgp1", "dgp1 or a covariate-free key=value spec file"),
    ],
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wdlearn", description="Learning bounds and experiments for weakly dependent series")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="key=value file merged under the flags")
    common.add_argument("--verbose", action="store_true", help="debug logging")
    for opt in GLOBAL_OPTIONS:
        common.add_argument(opt.flag, dest=opt.name, type=opt.parse, default=None, help=opt.help)

    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for command, options in COMMAND_OPTIONS.items():
        cmd = sub.add_parser(command, parents=[common], help=HANDLERS[command].__doc__)
        for opt in options:
            if opt.parse is _flag_bool:
                cmd.add_argument(opt.flag, dest=opt.name, type=opt.parse, nargs="?", const=True,
                                 default=None, help=opt.help)
            else:
                cmd.add_argument(opt.flag, dest=opt.name, type=opt.parse, default=None, help=opt.help)
    return parser


def resolve_options(options: List[Option], args: argparse.Namespace, config: Dict[str, str]) -> Dict[str, Any]:
    """
    Resolve every option: command-line flag first, then config file, then default.

    Raises:
        ValueError: If a config value cannot be parsed or a config key is unknown
    """
    known = {opt.name for opt in options}
    unknown = sorted(set(config) - known - set(MANIFEST_METADATA) - {"config", "verbose"})
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    resolved = {}
    for opt in options:
        flag_value = getattr(args, opt.name, None)
        if flag_value is not None:
            resolved[opt.name] = flag_value
        elif opt.name in config:
            try:
                resolved[opt.name] = opt.parse(config[opt.name])
            except ValueError as exc:
                raise ValueError(f"config key {opt.name}: {exc}") from exc
        else:
            resolved[opt.name] = opt.default
    return resolved


def write_manifest(out_dir: Path, command: str, resolved: Dict[str, Any]) -> Path:
    values = dict(resolved)
    values.update({"command": command, "manifest_version": MANIFEST_VERSION, "version": __version__,
                   "rng_algorithm": RNG_ALGORITHM})
    path = out_dir / MANIFEST_FILE
    write_key_value_file(path, values, header=(f"wdlearn {command} run manifest",))
    return path


def _dgp(text: str) -> BinaryDgpSpec:
    if text == DgpKind.DGP1.value:
        return BinaryDgpSpec.dgp1()
    if text == DgpKind.DGP2.value:
        return BinaryDgpSpec.dgp2()
    if not Path(text).is_file():
        raise ValueError(f"--dgp must be dgp1, dgp2 or an existing spec file, got {text!r}")
    return load_binary_spec(text)


def _train_config(cfg: Dict[str, Any], seed: int) -> TrainConfig:
    return TrainConfig(learning_rate=cfg["learning_rate"], batch_size=cfg["batch_size"],
                       patience_epochs=cfg["patience"], max_epochs=cfg["max_epochs"], seed=seed, loss=cfg["loss"])


def _architecture(cfg: Dict[str, Any], input_dim: int) -> Architecture:
    return Architecture.feedforward(input_dim, cfg["hidden_layers"], cfg["hidden_width"],
                                    cfg["activation"], cfg["output_activation"])


def _derived_seeds(seed: int, count: int) -> List[int]:
    return [int(s) for s in np.random.SeedSequence([seed]).generate_state(count)]


def _write_csv(frame: pd.DataFrame, path: Path) -> None:
    frame.to_csv(path, index=False, lineterminator=CSV_LINE_TERMINATOR)


def cmd_simulate(cfg: Dict[str, Any], out_dir: Path) -> str:
    """Simulate a trajectory and write trajectory.csv"""
    if cfg["acx_spec"]:
        traj = simulate_acx(load_acx_spec(cfg["acx_spec"]), cfg["n"], cfg["seed"], cfg["burn_in"])
        traj.to_csv(out_dir / "trajectory.csv")
        return f"simulated {len(traj)} AC-X observations, mean {float(np.mean(traj.labels)):.6f}"
    traj = simulate_binary(_dgp(cfg["dgp"]), cfg["n"], cfg["seed"], cfg["burn_in"])
    traj.to_csv(out_dir / "trajectory.csv")
    freq = transition_frequencies(traj)
    return (f"simulated {len(traj)} observations, share of +1 {float(np.mean(traj.labels > 0)):.6f}, "
            f"P(+1|-1)={freq.p_up_from_minus:.6f} P(+1|+1)={freq.p_up_from_plus:.6f}")


def cmd_train(cfg: Dict[str, Any], out_dir: Path) -> str:
    """Train the network classifier on a simulated or loaded trajectory"""
    sim_seed, test_seed, net_seed = _derived_seeds(cfg["seed"], 3)
    if cfg["data"]:
        traj = read_trajectory_csv(cfg["data"])
        sample = make_supervised(traj, cfg["lag_order"])
        test = None
    else:
        spec = _dgp(cfg["dgp"])
        p, q = supervised_layout(spec)
        sample = make_supervised(simulate_binary(spec, cfg["n"] + p, sim_seed, cfg["burn_in"]), p, q)
        test_n = cfg["test_n"] or cfg["n"]
        test = make_supervised(simulate_binary(spec, test_n + p, test_seed, cfg["burn_in"]), p, q)
    arch = _architecture(cfg, sample.dim)
    params, log = train_erm(sample, arch, _train_config(cfg, net_seed))
    log.to_csv(out_dir / "training_log.csv")
    write_params_csv(params, out_dir / "params.csv")
    report = empirical_01_risk(arch, params, test if test is not None else sample)
    report.to_csv(out_dir / "eval_report.csv")
    label = "test" if test is not None else "training"
    return f"best epoch {log.best_epoch} of {log.stopped_epoch}\n{label} evaluation:\n{report.pretty()}"


def cmd_bounds(cfg: Dict[str, Any], out_dir: Path) -> str:
    """Evaluate the deviation and generalization bounds and write bounds.csv"""
    if cfg["n"] is None:
        raise ValueError("--n is required")
    report = evaluate_bounds(bound_inputs_from_mapping(cfg))
    report.to_csv(out_dir / "bounds.csv")
    return report.pretty()


def cmd_depcheck(cfg: Dict[str, Any], out_dir: Path) -> str:
    """Tabulate weak-dependence bounds for a coefficient sequence"""
    kind = cfg["kind"].lower()
    if kind == "geometric":
        seq = CoefficientSequence.geometric(cfg["c"], cfg["a"])
    elif kind == "riemannian":
        seq = CoefficientSequence.riemannian(cfg["c"], cfg["gamma"])
    else:
        raise ValueError(f"--kind must be geometric or riemannian, got {cfg['kind']!r}")
    alpha = total_sum(seq)
    lines = [f"alpha = sum of coefficients = {alpha:.12g}"]
    if kind == "riemannian":
        lines.append(f"truncation certificate {truncation_certificate(seq):.3g}")
    if alpha >= 1.0:
        raise ValueError(f"contraction violated: alpha = {alpha} >= 1")
    table = tau_table(seq, cfg["j_max"])
    _write_csv(table, out_dir / "tau_table.csv")
    lines.append(f"tau bound at j={cfg['j_max']}: {table['tau_bound'].iloc[-1]:.6g}")
    if cfg["a3"]:
        if kind != "geometric":
            raise ValueError("--a3 witness is available for geometric sequences only")
        report = a3_witness(alpha, cfg["a"], cfg["mu"], cfg["k_max"])
        report.to_csv(out_dir / "a3.csv")
        lines.append(report.summary())
    return "\n".join(lines)


def cmd_experiment(cfg: Dict[str, Any], out_dir: Path) -> str:
    """Run the Monte-Carlo gap curve and write gap_curve.csv and replications.csv"""
    dgp = _dgp(cfg["dgp"])
    overrides = {"master_seed": cfg["seed"], "target_m": cfg["target_m"], "jobs": cfg["jobs"],
                 "fixed_test_size": cfg["fixed_test_size"], "burn_in": cfg["burn_in"],
                 "train": _train_config(cfg, cfg["seed"])}
    if cfg["n_grid"]:
        overrides["n_grid"] = cfg["n_grid"]
    if cfg["replications"]:
        overrides["replications"] = cfg["replications"]
    p, q = supervised_layout(dgp)
    overrides["arch"] = _architecture(cfg, p + (q if dgp.covariate_spec is not None else 0))
    plan = ExperimentPlan.preset(cfg["profile"], dgp, **overrides)
    curve = run_gap_curve(plan)
    curve.to_csv(out_dir / "gap_curve.csv")
    curve.replications_to_csv(out_dir / "replications.csv")
    return (f"target risk {curve.target_risk:.6f}, Bayes risk {curve.bayes_risk:.6f}, "
            f"{curve.failed} failed replications\n{curve.to_frame().to_string(index=False)}")


def cmd_recession(cfg: Dict[str, Any], out_dir: Path) -> str:
    """Fit and classify the quarterly recession indicator"""
    if cfg["fetch"]:
        series = fetch_usrecq(out_dir / "USRECQ.csv")
    else:
        series = load_usrecq(cfg["data"])
    arch = _architecture(cfg, 1)
    reports = run_recession_seeds(series, cfg["seeds"], arch, _train_config(cfg, cfg["seed"]), cfg["jobs"])
    reports[0].to_csv(out_dir / "recession_report.csv")
    rows = []
    for report in reports:
        c = report.test_report.confusion
        rows.append((report.seed, report.test_report.accuracy, report.recession_recall,
                     int(c[0, 0]), int(c[0, 1]), int(c[1, 0]), int(c[1, 1])))
    _write_csv(pd.DataFrame(rows, columns=["seed", "accuracy", "recall_plus", "confusion_neg_neg",
                                           "confusion_neg_pos", "confusion_pos_neg", "confusion_pos_pos"]),
               out_dir / "recession_seeds.csv")
    accuracies = [r.test_report.accuracy for r in reports]
    median = median_confusion(reports)
    return "\n".join([
        reports[0].pretty(),
        f"median test accuracy over {len(reports)} seed(s): {float(np.median(accuracies)):.6f}",
        f"median confusion: [[{median[0, 0]:g}, {median[0, 1]:g}], [{median[1, 0]:g}, {median[1, 1]:g}]]",
    ])


def cmd_oracle(cfg: Dict[str, Any], out_dir: Path) -> str:
    """Exact stationary quantities of a covariate-free binary chain"""
    oracle = exact_risk_oracle(_dgp(cfg["dgp"]))
    _write_csv(pd.DataFrame(list(oracle._asdict().items()), columns=["name", "value"]), out_dir / "oracle.csv")
    return "\n".join(f"{name:22s} {value:.12g}" for name, value in oracle._asdict().items())


HANDLERS = {
    "simulate": cmd_simulate,
    "train": cmd_train,
    "bounds": cmd_bounds,
    "depcheck": cmd_depcheck,
    "experiment": cmd_experiment,
    "recession": cmd_recession,
    "oracle": cmd_oracle,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Dispatch a subcommand.

    Returns:
        int: 0 on success, 1 on usage or validation errors, 2 on runtime failures
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        config = read_key_value_file(args.config) if args.config else {}
        if config.get("command", args.command) != args.command:
            raise ValueError(f"config was written for '{config['command']}', not '{args.command}'")
        options = GLOBAL_OPTIONS + COMMAND_OPTIONS[args.command]
        resolved = resolve_options(options, args, config)
        out_dir = Path(resolved["out_dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        summary = HANDLERS[args.command](resolved, out_dir)
        write_manifest(out_dir, args.command, resolved)
    except ValueError as exc:
        logger.error(f"{args.command}: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        logger.exception(f"{args.command} failed")
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(summary)
    return 0
