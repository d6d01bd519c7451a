"""Command-line front end: reproducible experiments with JSON/CSV reports.

JSON is the canonical output (sorted keys, floats at 17 significant digits,
byte-identical for identical flags and seed); CSV is a flat projection of the
per-step series for plotting. Exit codes: 0 success, 1 I/O or parse failure,
2 violated precondition, 3 numeric non-convergence.
"""
from __future__ import annotations

import argparse
import io
import json
import sys

import numpy as np

from . import graph as graphs
from .errors import (
    ConvergenceError,
    MissingParameter,
    ParseError,
    PreconditionError,
    PreconditionViolated,
)
from .homogeneous import (
    convergence_rate,
    d_curve,
    mixing_time,
    stationary_analytic,
    stationary_power,
    verify_lazy_slower,
)
from .inhomogeneous import (
    ChainSchedule,
    dim_check,
    necessary_condition_check,
    propagate_inhomogeneous,
    cauchy_gap_series,
)
from .mcre import EnvironmentSpec, degree_law_check, exhaustive_expected, monte_carlo_expected
from .operators import (
    attention_operator,
    dropedge_expected,
    lazy_walk,
    simple_rw,
)
from .oversmoothing import (
    _layer_sigmoid_gaps,
    min_layer_gap,
    node_std_metric,
    propagate_features,
)
from .trainer import TrainConfig, train

__all__ = ["main", "run", "build_graph_from_args", "build_schedule"]


# -- canonical serialization ---------------------------------------------------

def _canonical(value) -> str:
    if isinstance(value, dict):
        items = sorted(value.items(), key=lambda kv: str(kv[0]))
        body = ",".join(f"{json.dumps(str(k))}:{_canonical(v)}" for k, v in items)
        return "{" + body + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_canonical(v) for v in value) + "]"
    if isinstance(value, np.ndarray):
        return _canonical(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return json.dumps(value)


def canonical_json(report: dict) -> str:
    return _canonical(report) + "\n"


def _csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    cols = list(rows[0].keys())
    buf.write(",".join(cols) + "\n")
    for row in rows:
        buf.write(",".join(_canonical(row[c]).strip('"') for c in cols) + "\n")
    return buf.getvalue()


# -- graph / operator construction from flags -----------------------------------

def build_graph_from_args(args) -> graphs.Graph:
    if getattr(args, "edges", None):
        with open(args.edges, encoding="utf-8") as handle:
            return graphs.load_edge_list(handle.read())
    if not getattr(args, "gen", None):
        raise MissingParameter("either --gen or --edges is required")
    parts = args.gen.split(":")
    kind = parts[0]
    if len(parts) < 2:
        raise MissingParameter(f"--gen {args.gen!r} is missing the node count")
    n = int(parts[1])
    p = float(parts[2]) if len(parts) > 2 else None
    return graphs.generate(kind, n, p=p, seed=getattr(args, "seed", 0))


def _random_logits(g: graphs.Graph, rng: np.random.Generator, scale: float = 1.0):
    # Symmetric per-edge draws: the closed-form stationary distribution of a
    # row-softmax operator is only a true fixed point when logit(u,v) and
    # logit(v,u) agree, so the built-in schedules stay in that regime.
    logits = {}
    for u, v in sorted(g.edges):
        value = scale * rng.standard_normal()
        logits[(u, v)] = value
        if u != v:
            logits[(v, u)] = value
    return logits


def build_operator(g: graphs.Graph, op_spec: str, seed: int = 0):
    """Build the analysis operator; loop-requiring kinds augment the graph."""
    parts = op_spec.split(":")
    kind = parts[0]
    if kind == "rw":
        return simple_rw(g), g
    if kind == "lazy":
        gamma = float(parts[1]) if len(parts) > 1 else 0.5
        return lazy_walk(g, gamma), g
    if kind == "gcn":
        # The convolution operator is similar to the loop-augmented walk; the
        # chain analysis runs on the row-stochastic side of that similarity.
        gl = g if g.has_self_loops else graphs.add_self_loops(g)
        return simple_rw(gl), gl
    if kind == "dropedge":
        gl = g if g.has_self_loops else graphs.add_self_loops(g)
        return dropedge_expected(gl), gl
    if kind == "att":
        logits = _random_logits(g, np.random.default_rng(seed))
        return attention_operator(g, logits), g
    raise MissingParameter(f"unknown operator kind {kind!r}")


def build_schedule(g: graphs.Graph, kind: str, num_layers: int, seed: int = 0) -> ChainSchedule:
    """Built-in attention schedules: const, oscillate, decay, or file:path."""
    rng = np.random.default_rng(seed)
    if kind == "const":
        logits = _random_logits(g, rng)
        layers = [attention_operator(g, logits)] * num_layers
    elif kind == "oscillate":
        # Two strongly distinct layers with well-separated stationary
        # distributions, alternated forever.
        a = _random_logits(g, rng, scale=0.0)
        b = dict(a)
        non_loops = sorted(e for e in g.edges if e[0] != e[1])
        first, last = non_loops[0], non_loops[-1]
        a[first] = a[(first[1], first[0])] = 3.0
        b[last] = b[(last[1], last[0])] = 3.0
        pa, pb = attention_operator(g, a), attention_operator(g, b)
        layers = [pa if i % 2 == 0 else pb for i in range(num_layers)]
    elif kind == "decay":
        base = _random_logits(g, rng)
        layers = []
        for l in range(1, num_layers + 1):
            scaled = {k: val / l**2 for k, val in base.items()}
            layers.append(attention_operator(g, scaled))
    elif kind.startswith("file:"):
        with open(kind[5:], encoding="utf-8") as handle:
            per_layer = json.load(handle)
        layers = []
        for entry in per_layer:
            logits = {}
            for key, val in entry.items():
                u_str, v_str = key.split(",")
                logits[(int(u_str), int(v_str))] = float(val)
            layers.append(attention_operator(g, logits))
    else:
        raise MissingParameter(f"unknown schedule kind {kind!r}")
    return ChainSchedule(layers=tuple(layers))


# -- commands -------------------------------------------------------------------

def cmd_analyze(args) -> tuple[dict, list[dict]]:
    g = build_graph_from_args(args)
    if not graphs.is_connected(g):
        raise PreconditionViolated("graph is disconnected")
    op, ag = build_operator(g, args.op, seed=args.seed)
    op_kind = args.op.split(":")[0]
    if op_kind in ("rw", "att") and graphs.is_bipartite(ag):
        raise PreconditionViolated(
            "graph is bipartite: the walk is periodic and never mixes"
        )
    pi = stationary_analytic(ag) if op_kind in ("rw", "lazy", "gcn", "dropedge") else None
    if pi is None or np.abs(pi @ op.entries - pi).sum() > 1e-10:
        pi = stationary_power(op)
    curve = d_curve(op, pi, args.tmax)
    try:
        t_mix = mixing_time(op, pi, args.eps, args.tmax)
    except ConvergenceError:
        t_mix = None
    gamma = float(args.op.split(":")[1]) if op_kind == "lazy" else 0.5
    lazy_cmp = None
    if op_kind in ("rw", "lazy", "gcn"):
        cmp_graph = ag
        cmp = verify_lazy_slower(cmp_graph, gamma, min(args.tmax, 100))
        lazy_cmp = {
            "gamma": gamma,
            "rw_d": cmp.rw_d,
            "lazy_d": cmp.lazy_d,
            "all_slower": cmp.all_slower,
            "same_stationary": cmp.same_stationary,
        }
    rate = convergence_rate(ag, gamma if op_kind == "lazy" else 0.0) \
        if op_kind in ("rw", "lazy", "gcn") else None
    report = {
        "operator": args.op,
        "pi": pi,
        "d_curve": curve,
        "t_mix": t_mix,
        "rate_alpha": rate,
        "lazy_comparison": lazy_cmp,
    }
    rows = [{"t": t + 1, "d": float(curve[t])} for t in range(len(curve))]
    return report, rows


def cmd_dropedge(args) -> tuple[dict, list[dict]]:
    g = build_graph_from_args(args)
    if not g.has_self_loops:
        g = graphs.add_self_loops(g)
    spec = EnvironmentSpec(base_graph=g, base_seed=args.seed)
    analytic = dropedge_expected(g)
    estimate, se = monte_carlo_expected(spec, args.samples)
    err = np.abs(estimate.entries - analytic.entries)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(se > 0, err / se, 0.0)
    chi = degree_law_check(spec, min(args.samples, 100_000)) \
        if args.samples >= 1000 else []
    report = {
        "analytic": analytic.entries,
        "estimate": estimate.entries,
        "standard_errors": se,
        "max_abs_error": float(err.max()),
        "max_se_ratio": float(ratio.max()),
        "chi_square": [
            {"node": r.node, "statistic": r.statistic, "p_value": r.p_value,
             "passed": r.passed}
            for r in chi
        ],
    }
    if max(g.degrees) <= 12:
        exact = exhaustive_expected(spec)
        report["exhaustive_max_error"] = float(
            np.abs(exact.entries - analytic.entries).max()
        )
    rows = [
        {"row": i, "col": j,
         "analytic": float(analytic.entries[i, j]),
         "estimate": float(estimate.entries[i, j]),
         "se": float(se[i, j])}
        for i in range(g.n) for j in range(g.n)
    ]
    return report, rows


def cmd_inhomo(args) -> tuple[dict, list[dict]]:
    g = build_graph_from_args(args)
    schedule = build_schedule(g, args.schedule, args.layers, seed=args.seed)
    dim = dim_check(schedule)
    mu0 = np.full(schedule.n, 1.0 / schedule.n)
    nec = necessary_condition_check(schedule, mu0, tail_window=max(3, args.layers // 5))
    gaps = cauchy_gap_series(propagate_inhomogeneous(mu0, schedule))
    report = {
        "schedule": args.schedule,
        "layers": args.layers,
        "classification": dim.classification,
        "drift_partial_sums": dim.drift_partial_sums,
        "dobrushin_products": {str(k): v for k, v in dim.dobrushin_products.items()},
        "stationary_exists": dim.stationary_exists,
        "drift_summable": dim.drift_summable,
        "dobrushin_vanishes": dim.dobrushin_vanishes,
        "trajectory_gaps": gaps,
        "necessary_condition": {
            "trajectory_converged": nec.trajectory_converged,
            "stationary_converged": nec.stationary_converged,
            "consistent": nec.consistent,
            "min_drift": nec.min_drift,
            "contrapositive_triggered": nec.contrapositive_triggered,
        },
    }
    drifts = np.diff(np.concatenate([[0.0], dim.drift_partial_sums])) \
        if dim.drift_partial_sums.size else np.zeros(0)
    rows = []
    for l in range(len(gaps)):
        rows.append({
            "l": l + 1,
            "pi_drift": float(drifts[l]) if l < drifts.size else "",
            "gap": float(gaps[l]),
            "c_product_from_1": float(dim.dobrushin_products[1][l]),
        })
    return report, rows


def cmd_oversmooth(args) -> tuple[dict, list[dict]]:
    g = build_graph_from_args(args)
    op, ag = build_operator(g, args.op, seed=args.seed)
    rng = np.random.default_rng(args.seed)
    h0 = rng.standard_normal((ag.n, args.features))
    trajectory = propagate_features(op, h0, args.layers)
    sig_gaps = _layer_sigmoid_gaps(trajectory)
    rows = []
    for l in range(1, len(trajectory)):
        rows.append({
            "l": l,
            "node_std": node_std_metric(trajectory[l]),
            "min_gap": min_layer_gap(trajectory[: l + 1]),
            "rt_running_mean": float(sig_gaps[:l].mean()),
        })
    report = {
        "operator": args.op,
        "layers": args.layers,
        "node_std": [r["node_std"] for r in rows],
        "min_gap": [r["min_gap"] for r in rows],
        "rt_running_mean": [r["rt_running_mean"] for r in rows],
        "final_node_std": rows[-1]["node_std"],
    }
    return report, rows


def two_community_fixture(seed: int = 0) -> tuple[graphs.Graph, np.ndarray, dict]:
    """Four-node ring with loops, communities {0,1} and {2,3}.

    Small on purpose: the finite-difference trainer can then afford the
    epochs it takes for the gap regularizer to leave the fast-smoothing
    regime, which is where its effect on node spread becomes visible.
    """
    g = graphs.add_self_loops(graphs.build_graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)]))
    rng = np.random.default_rng(seed)
    h0 = np.zeros((4, 2))
    h0[:2, 0] = 1.0
    h0[2:, 1] = 1.0
    h0 += 0.1 * rng.standard_normal(h0.shape)
    labels = {
        0: np.array([1.0, 0.0]),
        2: np.array([0.0, 1.0]),
    }
    return g, h0, labels


def cmd_train_demo(args) -> tuple[dict, list[dict]]:
    g, h0, labels = two_community_fixture(args.seed)
    config = TrainConfig(
        learning_rate=args.lr,
        epochs=args.epochs,
        rt_weight=args.rt_weight,
        threshold=args.threshold,
        seed=args.seed,
        labeled_nodes=labels,
    )
    report_obj = train(g, h0, config, num_layers=args.layers)
    report = {
        "rt_weight": args.rt_weight,
        "threshold": args.threshold,
        "loss_curve": report_obj.loss_curve,
        "final_loss": report_obj.final_loss,
        "task_loss": report_obj.task_loss,
        "min_layer_gap": report_obj.min_layer_gap,
        "node_std_final": report_obj.node_std_final,
        "pi_drift": report_obj.pi_drift,
    }
    rows = [
        {"epoch": i, "loss": float(v)} for i, v in enumerate(report_obj.loss_curve)
    ]
    return report, rows


# -- entry point ----------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--gen", help="generator spec kind:n[:p], e.g. complete:3")
    parser.add_argument("--edges", help="path to an edge-list file")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smoothwalk",
        description="Markov-chain analysis of message passing on graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="stationary distribution, mixing, rates")
    _add_common(p)
    p.add_argument("--op", default="rw")
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--tmax", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("dropedge", help="random edge-dropping expectation check")
    _add_common(p)
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_dropedge)

    p = sub.add_parser("inhomo", help="time-inhomogeneous schedule diagnostics")
    _add_common(p)
    p.add_argument("--schedule", default="const",
                   help="const | oscillate | decay | file:path")
    p.add_argument("--layers", type=int, default=50)
    p.set_defaults(func=cmd_inhomo, gen_default="complete:3")

    p = sub.add_parser("oversmooth", help="feature propagation smoothing metrics")
    _add_common(p)
    p.add_argument("--op", default="rw")
    p.add_argument("--layers", type=int, default=50)
    p.add_argument("--features", type=int, default=4)
    p.set_defaults(func=cmd_oversmooth)

    p = sub.add_parser("train-demo", help="gap-regularized training demonstration")
    _add_common(p)
    p.add_argument("--rt-weight", "--lambda", dest="rt_weight", type=float, default=1.0)
    p.add_argument("--threshold", "--T", dest="threshold", type=float, default=0.3)
    p.add_argument("--epochs", type=int, default=150)
    p.add_argument("--lr", type=float, default=5.0)
    p.add_argument("--layers", type=int, default=4)
    p.set_defaults(func=cmd_train_demo)

    return parser


def run(argv: list[str]) -> tuple[int, str, str]:
    """Parse and execute; returns (exit_code, stdout_payload, stderr_text)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "gen", None) is None and getattr(args, "edges", None) is None:
        default = getattr(args, "gen_default", None)
        if default:
            args.gen = default
    try:
        report, rows = args.func(args)
    except (ParseError, OSError) as exc:
        return 1, "", f"error: {exc}\n"
    except PreconditionError as exc:
        return 2, "", f"precondition violated: {exc}\n"
    except ConvergenceError as exc:
        return 3, "", f"did not converge: {exc}\n"
    payload = canonical_json(report) if args.format == "json" else _csv(rows)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(payload)
        except OSError as exc:
            return 1, "", f"error: {exc}\n"
        return 0, "", ""
    return 0, payload, ""


def main(argv: list[str] | None = None) -> int:
    code, payload, err = run(sys.argv[1:] if argv is None else argv)
    if err:
        sys.stderr.write(err)
    if payload:
        sys.stdout.write(payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
