"""Command-line driver: verification reports, single runs, repetition stats.

Every command is a pure function of (config, seed): rerunning with the
same inputs reproduces the output byte for byte. Configuration comes
from an optional flat JSON document plus flag overrides; complex values
are written as [re, im] pairs. Exit codes: 0 ok, 1 verification
failure, 2 usage or config error, 3 protocol assumption or positivity
violation.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import click
import numpy as np

from . import analysis, protocols
from .protocols import (
    AssumptionError,
    BellOutcome,
    ChannelParams,
    InputState,
    PovmPositivityError,
    TeleportResult,
    channel_branch,
    collapse_table_entry,
    make_cluster_channel,
    make_povm,
    povm_rho_min,
    povm_teleport,
    preserving_teleport,
)
from .qcore import (
    BELL_VECTORS,
    PureState,
    bell_measure,
    extract_qubit_state,
    fidelity,
    reorder,
    tensor_product,
)

EXIT_VERIFICATION = 1
EXIT_USAGE = 2
EXIT_ASSUMPTION = 3

PROTOCOLS = {"ramirez": "povm-based", "proposed": "information-preserving"}

_CONFIG_KEYS = {
    "a", "b", "input_state", "alpha", "beta", "gamma", "eta",
    "rho", "seed", "trials", "max_tries", "format", "out", "protocol",
}


def _g(x: float) -> str:
    """Probabilities and amplitudes print with 12 significant digits."""
    return format(float(x), ".12g")


def _c(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


@dataclass
class RunConfig:
    zeta: InputState
    params: ChannelParams
    rho: Optional[float]
    seed: int
    trials: int
    max_tries: int
    fmt: str
    out: Optional[Path]
    protocol: str
    random_input: bool

    def describe(self) -> dict:
        return {
            "a": _c(self.zeta.a),
            "b": _c(self.zeta.b),
            "alpha": _c(self.params.alpha),
            "beta": _c(self.params.beta),
            "gamma": _c(self.params.gamma),
            "eta": _c(self.params.eta),
            "rho": self.rho,
            "seed": self.seed,
            "trials": self.trials,
            "max_tries": self.max_tries,
            "random_input": self.random_input,
        }


def _parse_complex(value, key: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) for v in value)
    ):
        return complex(value[0], value[1])
    raise click.UsageError(f"config key {key!r} must be a number or an [re, im] pair")


def build_config(
    config_path: Optional[Path] = None,
    a: Optional[float] = None,
    b: Optional[float] = None,
    alpha: Optional[float] = None,
    beta: Optional[float] = None,
    gamma: Optional[float] = None,
    eta: Optional[float] = None,
    rho: Optional[float] = None,
    seed: Optional[int] = None,
    trials: Optional[int] = None,
    max_tries: Optional[int] = None,
    fmt: Optional[str] = None,
    out: Optional[Path] = None,
    protocol: Optional[str] = None,
    default_fmt: str = "human",
) -> RunConfig:
    """Merge config file and flag overrides, then validate everything."""
    data: dict = {}
    if config_path is not None:
        try:
            data = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise click.UsageError(f"cannot read config {config_path}: {exc}")
        if not isinstance(data, dict):
            raise click.UsageError("config document must be a JSON object")
        unknown = set(data) - _CONFIG_KEYS
        if unknown:
            raise click.UsageError(f"unknown config keys: {sorted(unknown)}")

    overrides = {
        "a": a, "b": b, "alpha": alpha, "beta": beta, "gamma": gamma, "eta": eta,
        "rho": rho, "seed": seed, "trials": trials, "max_tries": max_tries,
        "format": fmt, "out": out, "protocol": protocol,
    }
    for key, value in overrides.items():
        if value is not None:
            data[key] = value

    seed_val = int(data.get("seed", 0))
    random_input = data.get("input_state") == "random"
    try:
        if random_input:
            zeta = InputState.random(np.random.default_rng([seed_val, 1]))
        else:
            zeta = InputState(
                _parse_complex(data.get("a", 0.6), "a"),
                _parse_complex(data.get("b", 0.8), "b"),
            )
        params = ChannelParams(
            _parse_complex(data.get("alpha", 0.5), "alpha"),
            _parse_complex(data.get("beta", 0.5), "beta"),
            _parse_complex(data.get("gamma", 0.5), "gamma"),
            _parse_complex(data.get("eta", 0.5), "eta"),
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))

    rho_val = data.get("rho")
    if rho_val is not None:
        rho_val = float(rho_val)
        if rho_val <= 0:
            raise click.UsageError("rho must be positive")
    trials_val = int(data.get("trials", 100000))
    tries_val = int(data.get("max_tries", 20))
    if trials_val < 1 or tries_val < 1:
        raise click.UsageError("trials and max-tries must be >= 1")
    fmt_val = str(data.get("format", default_fmt))
    if fmt_val not in ("human", "json", "csv"):
        raise click.UsageError(f"unknown format {fmt_val!r}")
    protocol_val = str(data.get("protocol", "proposed"))
    if protocol_val not in PROTOCOLS:
        raise click.UsageError(f"unknown protocol {protocol_val!r}")
    out_val = data.get("out")
    return RunConfig(
        zeta=zeta,
        params=params,
        rho=rho_val,
        seed=seed_val,
        trials=trials_val,
        max_tries=tries_val,
        fmt=fmt_val,
        out=Path(out_val) if out_val is not None else None,
        protocol=protocol_val,
        random_input=random_input,
    )


def _emit(cfg: RunConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.out is not None:
        cfg.out.write_text(text)
        click.echo(f"wrote {cfg.out}", err=True)
    else:
        click.echo(text, nl=False)


def _common_options(f):
    f = click.option("--config", "config_path", type=click.Path(path_type=Path),
                     default=None, help="Flat JSON config document.")(f)
    f = click.option("--seed", type=int, default=None, help="RNG seed.")(f)
    f = click.option("--format", "fmt", type=click.Choice(["human", "json", "csv"]),
                     default=None, help="Output format.")(f)
    f = click.option("--out", type=click.Path(path_type=Path), default=None,
                     help="Write the report to this path instead of stdout.")(f)
    return f


def _state_options(f):
    f = click.option("--a", type=float, default=None, help="Real amplitude of |0>.")(f)
    f = click.option("--b", type=float, default=None, help="Real amplitude of |1>.")(f)
    f = click.option("--alpha", type=float, default=None, help="Channel coefficient alpha.")(f)
    f = click.option("--beta", type=float, default=None, help="Channel coefficient beta.")(f)
    f = click.option("--gamma", type=float, default=None, help="Channel coefficient gamma.")(f)
    f = click.option("--eta", type=float, default=None, help="Channel coefficient eta.")(f)
    return f


@click.group()
def main():
    """Simulate and verify two controlled probabilistic teleportation
    protocols over a four-qubit cluster channel."""


# ---------------------------------------------------------------------------
# verify-tables

def _verify_table1(cfg: RunConfig, corrupt: Optional[tuple[str, str]]) -> list[dict]:
    rows = []
    state = tensor_product(cfg.zeta.as_state("A"), make_cluster_channel(cfg.params))
    for a_out in bell_measure(state, "A", "Q1"):
        for bob in BellOutcome:
            alice = BellOutcome(a_out.label)
            entry = collapse_table_entry(alice, bob, cfg.params)
            delta0, delta1 = entry.delta0, entry.delta1
            if corrupt == (alice.value, bob.value):
                delta0 = delta0 * 1.01 + 0.01  # test hook: poison the oracle
                entry = protocols.CollapseEntry(alice, bob, delta0, delta1, entry.pre_correction)
            expected_weight = entry.collapse_weight(cfg.zeta)
            row = {
                "alice": alice.value,
                "bob": bob.value,
                "cell": entry.describe(),
                "delta0": _c(delta0),
                "delta1": _c(delta1),
                "pre_correction": entry.pre_correction.value,
                "prob_analytic": expected_weight,
            }
            if a_out.post_state is None:
                row.update(prob_simulated=0.0, fidelity_deviation=0.0,
                           prob_deviation=abs(expected_weight),
                           passed=expected_weight < 1e-12, note="zero-weight branch")
                rows.append(row)
                continue
            b_outs = bell_measure(a_out.post_state, "Q2", "Q3")
            b_out = b_outs[list(BellOutcome).index(bob)]
            joint = a_out.probability * b_out.probability
            prob_dev = abs(joint - expected_weight)
            if b_out.post_state is None or joint < 1e-14:
                row.update(prob_simulated=joint, fidelity_deviation=0.0,
                           prob_deviation=prob_dev,
                           passed=expected_weight < 1e-12 and prob_dev < 1e-12,
                           note="zero-weight branch")
                rows.append(row)
                continue
            simulated_q4 = extract_qubit_state(b_out.post_state, "Q4")
            expected_state = entry.collapse_state(cfg.zeta)
            fid_dev = abs(1.0 - fidelity(simulated_q4, expected_state))
            row.update(prob_simulated=joint, fidelity_deviation=fid_dev,
                       prob_deviation=prob_dev,
                       passed=fid_dev < 1e-10 and prob_dev < 1e-12)
            rows.append(row)
    return rows


def _verify_table2(cfg: RunConfig) -> list[dict]:
    rows = []
    channel = make_cluster_channel(cfg.params)
    outcomes = bell_measure(channel, "Q2", "Q3")
    for out in outcomes:
        bob = BellOutcome(out.label)
        branch = channel_branch(bob, cfg.params)
        row = {
            "outcome": bob.value,
            "form": branch.form.value,
            "u": _c(branch.u),
            "v": _c(branch.v),
            "prob_analytic": branch.prob,
            "prob_simulated": out.probability,
            "rotation_axis": list(branch.rotation_axis),
        }
        prob_dev = abs(out.probability - branch.prob)
        if out.post_state is None:
            row.update(fidelity_deviation=0.0, prob_deviation=prob_dev,
                       passed=prob_dev < 1e-12, note="zero-weight branch")
            rows.append(row)
            continue
        expected_full = tensor_product(
            branch.collapse_state(("Q1", "Q4")),
            PureState(("Q2", "Q3"), BELL_VECTORS[bob]),
        )
        expected_full = reorder(expected_full, out.post_state.labels)
        fid_dev = abs(1.0 - fidelity(out.post_state, expected_full))
        row.update(fidelity_deviation=fid_dev, prob_deviation=prob_dev,
                   passed=fid_dev < 1e-12 and prob_dev < 1e-12)
        rows.append(row)
    return rows


def _verify_povm(cfg: RunConfig) -> list[dict]:
    rows = []
    for pair_name, d0_raw, d1_raw in (
        ("alpha-eta", cfg.params.alpha, cfg.params.eta),
        ("beta-gamma", cfg.params.beta, cfg.params.gamma),
    ):
        d0, d1 = abs(d0_raw), abs(d1_raw)
        if d0 < 1e-12 or d1 < 1e-12:
            rows.append({"pair": pair_name, "passed": True,
                         "note": "zero weight, POVM undefined"})
            continue
        rho_min = povm_rho_min(d0, d1)
        rho = max(2.0, rho_min) if cfg.rho is None else cfg.rho
        config = make_povm(d0, d1, rho)
        completeness = float(np.max(np.abs(
            sum(e.matrix for e in config.elements) - np.eye(2)
        )))
        min_eig = min(float(np.linalg.eigvalsh(e.matrix)[0]) for e in config.elements)
        unit_dev = max(abs(float(np.linalg.norm(config.m1)) - 1.0),
                       abs(float(np.linalg.norm(config.m2)) - 1.0))
        report = analysis.povm_probability_report(config, cfg.zeta)
        symmetry = abs(report.simulated[0] - report.simulated[1])
        total_dev = abs(sum(report.simulated) - 1.0)
        rows.append({
            "pair": pair_name,
            "delta0": d0,
            "delta1": d1,
            "rho": rho,
            "rho_min": rho_min,
            "completeness_deviation": completeness,
            "min_eigenvalue": min_eig,
            "unit_vector_deviation": unit_dev,
            "closed_form": list(report.closed_form),
            "simulated": list(report.simulated),
            "closed_vs_simulated": report.max_discrepancy,
            "conclusive_symmetry_deviation": symmetry,
            "total_probability_deviation": total_dev,
            # The closed-form/simulated gap is a documented finding, not
            # a failure; only structural checks gate the verdict.
            "passed": completeness < 1e-10 and min_eig > -1e-12
            and unit_dev < 1e-12 and symmetry < 1e-12 and total_dev < 1e-12,
        })
    return rows


def _render_verify_human(report: dict) -> str:
    lines = ["collapse table (sender x controller outcomes)", "-" * 78]
    for r in report["table1"]:
        status = "PASS" if r["passed"] else "FAIL"
        lines.append(
            f"{status}  {r['alice']:<5} {r['bob']:<5} {r['cell']:<28}"
            f" prob={_g(r['prob_analytic']):<18}"
            f" fid_dev={r['fidelity_deviation']:.2e} prob_dev={r['prob_deviation']:.2e}"
        )
    lines += ["", "collapsed-channel branches (controller outcomes)", "-" * 78]
    for r in report["table2"]:
        status = "PASS" if r["passed"] else "FAIL"
        lines.append(
            f"{status}  {r['outcome']:<5} {r['form']:<14}"
            f" Pr={_g(r['prob_analytic']):<18}"
            f" u={r['u'][0]:+.6f} v={r['v'][0]:+.6f}"
            f" fid_dev={r['fidelity_deviation']:.2e}"
        )
    lines += ["", "discrimination POVM", "-" * 78]
    for r in report["povm"]:
        status = "PASS" if r["passed"] else "FAIL"
        if "note" in r:
            lines.append(f"{status}  {r['pair']:<11} {r['note']}")
            continue
        lines.append(
            f"{status}  {r['pair']:<11} rho={_g(r['rho'])} rho_min={_g(r['rho_min'])}"
            f" completeness={r['completeness_deviation']:.2e}"
        )
        lines.append(
            f"      closed-form outcome probs: {[_g(v) for v in r['closed_form']]}"
        )
        lines.append(
            f"      simulated outcome probs:   {[_g(v) for v in r['simulated']]}"
            f"  (gap {r['closed_vs_simulated']:.4g}, reported not reconciled)"
        )
    lines += ["", f"overall: {'PASS' if report['all_pass'] else 'FAIL'}"]
    return "\n".join(lines) + "\n"


def _render_verify_csv(report: dict) -> str:
    lines = ["section,label,metric,value"]
    for r in report["table1"]:
        label = f"{r['alice']}|{r['bob']}"
        lines.append(f"table1,{label},prob_analytic,{_g(r['prob_analytic'])}")
        lines.append(f"table1,{label},prob_simulated,{_g(r['prob_simulated'])}")
        lines.append(f"table1,{label},fidelity_deviation,{_g(r['fidelity_deviation'])}")
        lines.append(f"table1,{label},passed,{str(r['passed']).lower()}")
    for r in report["table2"]:
        label = r["outcome"]
        lines.append(f"table2,{label},prob_analytic,{_g(r['prob_analytic'])}")
        lines.append(f"table2,{label},prob_simulated,{_g(r['prob_simulated'])}")
        lines.append(f"table2,{label},fidelity_deviation,{_g(r['fidelity_deviation'])}")
        lines.append(f"table2,{label},passed,{str(r['passed']).lower()}")
    for r in report["povm"]:
        label = r["pair"]
        if "note" in r:
            lines.append(f"povm,{label},note,{r['note']}")
        else:
            for i in range(3):
                lines.append(f"povm,{label},closed_form_{i},{_g(r['closed_form'][i])}")
                lines.append(f"povm,{label},simulated_{i},{_g(r['simulated'][i])}")
        lines.append(f"povm,{label},passed,{str(r['passed']).lower()}")
    lines.append(f"overall,,all_pass,{str(report['all_pass']).lower()}")
    return "\n".join(lines) + "\n"


@main.command("verify-tables")
@_common_options
@_state_options
@click.option("--rho", type=float, default=None, help="POVM scale parameter.")
@click.option("--corrupt-cell", default=None, hidden=True,
              help="Test hook: 'alice,bob' cell whose oracle is poisoned.")
def cmd_verify_tables(config_path, seed, fmt, out, a, b, alpha, beta, gamma, eta,
                      rho, corrupt_cell):
    """Re-derive both analytic outcome tables by simulation, cell by cell."""
    cfg = build_config(config_path, a, b, alpha, beta, gamma, eta, rho, seed,
                       None, None, fmt, out, None)
    corrupt = None
    if corrupt_cell is not None:
        parts = corrupt_cell.split(",")
        if len(parts) != 2:
            raise click.UsageError("--corrupt-cell expects 'alice,bob'")
        corrupt = (parts[0].strip(), parts[1].strip())
    try:
        report = {
            "table1": _verify_table1(cfg, corrupt),
            "table2": _verify_table2(cfg),
            "povm": _verify_povm(cfg),
        }
    except (AssumptionError, PovmPositivityError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ASSUMPTION)
    report["all_pass"] = all(
        r["passed"] for section in ("table1", "table2", "povm") for r in report[section]
    )
    if cfg.fmt == "json":
        _emit(cfg, json.dumps(report, indent=2))
    elif cfg.fmt == "csv":
        _emit(cfg, _render_verify_csv(report))
    else:
        _emit(cfg, _render_verify_human(report))
    if not report["all_pass"]:
        for section in ("table1", "table2", "povm"):
            for r in report[section]:
                if not r["passed"]:
                    name = r.get("cell") or r.get("outcome") or r.get("pair")
                    label = (
                        f"alice={r['alice']} bob={r['bob']}" if "alice" in r
                        else str(name)
                    )
                    click.echo(f"first failing cell: {section} {label}", err=True)
                    sys.exit(EXIT_VERIFICATION)
    sys.exit(0)


# ---------------------------------------------------------------------------
# run

def _result_dict(result: TeleportResult) -> dict:
    return {
        "status": result.status.value,
        "target_fidelity": result.target_fidelity,
        "sender_fidelity_on_fail": result.sender_fidelity_on_fail,
    }


def _render_run_human(cfg: RunConfig, protocol: str, result: TeleportResult) -> str:
    lines = [
        f"protocol: {protocol} ({PROTOCOLS[protocol]})",
        f"seed: {cfg.seed}",
        "input: a=" + _g(abs(cfg.zeta.a)) + f" (phase {np.angle(cfg.zeta.a):+.6f}),"
        + " b=" + _g(abs(cfg.zeta.b)) + f" (phase {np.angle(cfg.zeta.b):+.6f})",
        "events:",
    ]
    for event in result.transcript.events:
        d = event.to_dict()
        kind = d.pop("event")
        detail = ", ".join(f"{k}={v}" for k, v in d.items())
        lines.append(f"  {kind:<12} {detail}")
    lines.append(f"status: {result.status.value}")
    lines.append(f"target fidelity: {_g(result.target_fidelity)}")
    if result.sender_fidelity_on_fail is not None:
        lines.append(f"sender fidelity on fail: {_g(result.sender_fidelity_on_fail)}")
    return "\n".join(lines) + "\n"


@main.command("run")
@_common_options
@_state_options
@click.option("--protocol", type=click.Choice(sorted(PROTOCOLS)), default=None,
              help="Which protocol to execute (default: proposed).")
@click.option("--rho", type=float, default=None,
              help="POVM scale parameter (ramirez only; default max(2, rho_min)).")
def cmd_run(config_path, seed, fmt, out, a, b, alpha, beta, gamma, eta, protocol, rho):
    """Execute a single seeded protocol run and emit its full transcript."""
    cfg = build_config(config_path, a, b, alpha, beta, gamma, eta, rho, seed,
                       None, None, fmt, out, protocol)
    try:
        if cfg.protocol == "ramirez":
            result = povm_teleport(cfg.zeta, cfg.params, rho=cfg.rho, seed=cfg.seed)
        else:
            result = preserving_teleport(cfg.zeta, cfg.params, seed=cfg.seed)
    except (AssumptionError, PovmPositivityError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ASSUMPTION)
    if cfg.fmt == "json":
        doc = {
            "protocol": cfg.protocol,
            "config": cfg.describe(),
            "result": _result_dict(result),
            "events": result.transcript.to_dicts(),
        }
        _emit(cfg, json.dumps(doc, indent=2))
    elif cfg.fmt == "csv":
        sender = result.sender_fidelity_on_fail
        lines = [
            "protocol,seed,status,target_fidelity,sender_fidelity_on_fail",
            f"{cfg.protocol},{cfg.seed},{result.status.value},"
            f"{_g(result.target_fidelity)},"
            + ("" if sender is None else _g(sender)),
        ]
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _emit(cfg, _render_run_human(cfg, cfg.protocol, result))
    sys.exit(0)


# ---------------------------------------------------------------------------
# repeat

@main.command("repeat")
@_common_options
@_state_options
@click.option("--trials", type=int, default=None, help="Number of repeat-until-success trials.")
@click.option("--max-tries", type=int, default=None, help="Attempt cap per trial.")
@click.option("--plot", type=click.Path(path_type=Path), default=None,
              help="Also render the first-success histogram to this file.")
def cmd_repeat(config_path, seed, fmt, out, a, b, alpha, beta, gamma, eta,
               trials, max_tries, plot):
    """Monte Carlo repeat-until-success statistics for the preserving scheme."""
    cfg = build_config(config_path, a, b, alpha, beta, gamma, eta, None, seed,
                       trials, max_tries, fmt, out, None)
    try:
        stats = analysis.monte_carlo_repeat(
            cfg.zeta, cfg.params, cfg.trials, cfg.max_tries, cfg.seed
        )
    except (AssumptionError, PovmPositivityError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ASSUMPTION)
    geom = {
        k: stats.trials * (1.0 - stats.p_closed) ** (k - 1) * stats.p_closed
        for k in stats.first_success_histogram
    }
    if cfg.fmt == "json":
        doc = {
            "config": cfg.describe(),
            "trials": stats.trials,
            "max_tries": stats.max_tries,
            "seed": stats.seed,
            "attempts": stats.attempts,
            "successes": stats.successes,
            "exhausted": stats.exhausted,
            "p_hat": stats.p_hat,
            "p_closed": stats.p_closed,
            "histogram": [
                {"k": k, "count": c, "geom_expected": geom[k]}
                for k, c in stats.first_success_histogram.items()
            ],
        }
        _emit(cfg, json.dumps(doc, indent=2))
    elif cfg.fmt == "csv":
        lines = ["p_hat,p_closed,k,count,geom_expected"]
        for k, count in stats.first_success_histogram.items():
            lines.append(
                f"{_g(stats.p_hat)},{_g(stats.p_closed)},{k},{count},{_g(geom[k])}"
            )
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        lines = [
            f"trials: {stats.trials}   max tries: {stats.max_tries}   seed: {stats.seed}",
            f"attempts: {stats.attempts}   successes: {stats.successes}"
            f"   exhausted: {stats.exhausted}",
            f"per-attempt success: observed {_g(stats.p_hat)}"
            f" vs closed form {_g(stats.p_closed)}",
            "first-success histogram (k, count, geometric expectation):",
        ]
        for k, count in stats.first_success_histogram.items():
            lines.append(f"  {k:>3}  {count:>8}  {geom[k]:12.2f}")
        _emit(cfg, "\n".join(lines) + "\n")
    if plot is not None:
        from . import plotting

        plotting.render_repeat_histogram(stats, plot)
        click.echo(f"wrote {plot}", err=True)
    sys.exit(0)


# ---------------------------------------------------------------------------
# fig2

def _parse_grid(text: str, cast, name: str) -> list:
    try:
        values = [cast(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise click.UsageError(f"cannot parse --{name} value {text!r}")
    if not values:
        raise click.UsageError(f"--{name} must list at least one value")
    return values


@main.command("fig2")
@_common_options
@click.option("--p-grid", default=None,
              help="Comma-separated per-attempt success probabilities.")
@click.option("--n-grid", default=None, help="Comma-separated attempt counts.")
@click.option("--plot", type=click.Path(path_type=Path), default=None,
              help="Also render the success curves to this file.")
def cmd_fig2(config_path, seed, fmt, out, p_grid, n_grid, plot):
    """Tabulate the total success probability 1 - (1-p)^N over sweeps.

    With no grid flags, emits the two standard sweeps: N in {2, 10, 50,
    100} over a fine p grid, and p in {0.1 .. 0.5} over N = 1..100.
    """
    cfg = build_config(config_path, None, None, None, None, None, None, None,
                       seed, None, None, fmt, out, None, default_fmt="csv")
    try:
        if p_grid is None and n_grid is None:
            rows = analysis.default_success_grid()
        else:
            ps = (
                _parse_grid(p_grid, float, "p-grid")
                if p_grid is not None
                else list(analysis.DEFAULT_P_CURVES)
            )
            ns = (
                _parse_grid(n_grid, int, "n-grid")
                if n_grid is not None
                else list(analysis.DEFAULT_N_CURVES)
            )
            rows = analysis.success_grid(ps, ns)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    if cfg.fmt == "json":
        doc = [{"p": r.p, "N": r.N, "prob": r.prob} for r in rows]
        _emit(cfg, json.dumps(doc, indent=2))
    elif cfg.fmt == "human":
        lines = [f"{'p':>6} {'N':>4} {'prob':>16}"]
        for r in rows:
            lines.append(f"{r.p:>6g} {r.N:>4} {_g(r.prob):>16}")
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        lines = ["p,N,prob"]
        for r in rows:
            lines.append(f"{_g(r.p)},{r.N},{_g(r.prob)}")
        _emit(cfg, "\n".join(lines) + "\n")
    if plot is not None:
        from . import plotting

        plotting.render_success_grid(rows, plot)
        click.echo(f"wrote {plot}", err=True)
    sys.exit(0)


if __name__ == "__main__":
    main()
