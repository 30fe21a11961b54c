"""Command-line entry points for simulation, scoring, search and evaluation."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import datagen, metrics
from .config import PRIOR_NAMES, RunConfig
from .dag import Dag, minimal_layering, read_adjacency, write_adjacency
from .inference import ScoreFn, SearchParams, gibbs_run, stochastic_search
from .likelihood import DataMatrix, FamilyCache
from .priors import (
    MINIMAL_HOPPE_BETA,
    sample_hoppe_beta,
    sample_minimal_hoppe_beta,
)


def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="TOML run-configuration file")
    p.add_argument("--prior", choices=sorted(PRIOR_NAMES) + ["all"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float, nargs="+",
                   help="near b1 b2 [far b1 b2], per the beta scheme")
    p.add_argument("--beta-scheme", dest="beta_scheme",
                   choices=["constant", "adjacent_only", "two_level"])
    p.add_argument("--gamma", type=float)
    p.add_argument("--alpha-tilde", dest="alpha_tilde", type=float)
    p.add_argument("--iters", type=int)
    p.add_argument("--chains", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--top-k", dest="top_k", type=int)
    p.add_argument("--out")
    p.add_argument("--data")
    p.add_argument("--truth")


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_toml(args.config) if args.config else RunConfig()
    overrides = {k: getattr(args, k, None) for k in
                 ("prior", "alpha", "beta_scheme", "gamma", "alpha_tilde",
                  "iters", "chains", "seed", "top_k", "out", "data", "truth")}
    if getattr(args, "beta", None) is not None:
        overrides["beta"] = tuple(args.beta)
    return cfg.override(**overrides)


def _truth_dag(cfg: RunConfig) -> Dag:
    if cfg.truth:
        return read_adjacency(cfg.truth)
    return datagen.hepar2_structure()


def cmd_simulate_data(args) -> int:
    cfg = _load_config(args)
    truth = _truth_dag(cfg)
    rng = np.random.default_rng(cfg.seed)
    net = datagen.random_cpts(truth, np.full(truth.d, 2), rng,
                              adjust=args.cpt_adjust)
    data = datagen.forward_sample(net, args.n if args.n is not None else cfg.n_rows, rng)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    data.to_csv(out / "data.csv")
    net.save(out / "network.txt")
    write_adjacency(truth, out / "truth.txt")
    print(f"wrote {data.n} rows over {data.d} variables to {out / 'data.csv'}")
    return 0


def cmd_sample_prior(args) -> int:
    cfg = _load_config(args)
    params = cfg.prior_params()
    rng = np.random.default_rng(cfg.seed)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    edge_counts, layer_counts = [], []
    for i in range(args.n):
        if params.mode == MINIMAL_HOPPE_BETA:
            g = sample_minimal_hoppe_beta(args.d, params, rng)
        else:
            _, g = sample_hoppe_beta(args.d, params, rng)
        edge_counts.append(g.edge_count)
        layer_counts.append(minimal_layering(g).K)
        write_adjacency(g, out / f"sample_{i:04d}.txt")
    print(f"draws={args.n} mean_edges={np.mean(edge_counts):.4f} "
          f"mean_layers={np.mean(layer_counts):.4f}")
    return 0


def cmd_score(args) -> int:
    cfg = _load_config(args)
    g = read_adjacency(args.graph)
    data = DataMatrix.from_csv(cfg.data)
    score = ScoreFn(cfg.prior_params(), data, cfg.gamma)
    lp, ll, ls = score.log_score(g)
    print(f"log_prior={lp!r} log_lik={ll!r} log_score={ls!r}")
    return 0


def _run_search_one_prior(cfg: RunConfig, prior_name: str, data: DataMatrix,
                          truth: Dag, out: Path) -> dict:
    params = cfg.prior_params(prior_name)
    cache = FamilyCache(data, cfg.gamma)
    score = ScoreFn(params, data, cfg.gamma, cache=cache)
    trajectories = []
    for chain in range(cfg.chains):
        sp = SearchParams(cfg.alpha_tilde, cfg.iters,
                          seed=[cfg.seed, chain],
                          literal_repair=cfg.literal_repair)
        traj = stochastic_search(data, score, sp)
        traj.to_csv(out / f"traj_{prior_name}_chain{chain}.csv")
        write_adjacency(traj.best_graph, out / f"best_{prior_name}_chain{chain}.txt")
        trajectories.append(traj)
    maps = metrics.aggregate_heatmaps(trajectories, cfg.top_k)
    metrics.write_heatmap_csv(maps["top_pool"], out / f"heatmap_{prior_name}_top{cfg.top_k}.csv")
    metrics.write_heatmap_csv(maps["overall_best"], out / f"heatmap_{prior_name}_best.csv")
    metrics.write_heatmap_csv(maps["chain_bests"], out / f"heatmap_{prior_name}_perchain.csv")
    lp, ll, ls = score.log_score(truth)
    with open(out / f"truth_{prior_name}.csv", "w") as fh:
        fh.write("log_prior,log_lik,log_score\n")
        fh.write(f"{float(lp)!r},{float(ll)!r},{float(ls)!r}\n")
    top = metrics.top_scoring_graphs(trajectories, cfg.top_k)
    tprs = np.array([metrics.tpr(g, truth) for g, _ in top])
    spcs = np.array([metrics.spc(g, truth) for g, _ in top])
    convs = np.array([metrics.specificity_conventional(g, truth) for g, _ in top])
    return {
        "prior": prior_name,
        "tpr_mean": float(tprs.mean()), "tpr_se": float(tprs.std(ddof=0)),
        "spc_mean": float(spcs.mean()), "spc_se": float(spcs.std(ddof=0)),
        "spec_conv_mean": float(convs.mean()),
    }


def cmd_search(args) -> int:
    cfg = _load_config(args)
    data = DataMatrix.from_csv(cfg.data)
    truth = _truth_dag(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    priors = sorted(PRIOR_NAMES) if cfg.prior == "all" else [cfg.prior]
    rows = [_run_search_one_prior(cfg, name, data, truth, out) for name in priors]
    with open(out / "results_table.csv", "w") as fh:
        fh.write("prior,tpr_mean,tpr_se,spc_mean,spc_se,spec_conv_mean\n")
        for r in rows:
            fh.write(f"{r['prior']},{r['tpr_mean']!r},{r['tpr_se']!r},"
                     f"{r['spc_mean']!r},{r['spc_se']!r},{r['spec_conv_mean']!r}\n")
    for r in rows:
        print(f"{r['prior']}: TPR {r['tpr_mean']:.3f}/{r['tpr_se']:.3f} "
              f"SPC {r['spc_mean']:.3f}/{r['spc_se']:.3f}")
    return 0


def cmd_gibbs(args) -> int:
    cfg = _load_config(args)
    data = DataMatrix.from_csv(cfg.data)
    params = cfg.prior_params("minimal")
    score = ScoreFn(params, data, cfg.gamma)
    graphs = gibbs_run(data, score, args.samples, cfg.seed, thin=args.thin)
    marginals = np.mean([g.adj for g in graphs], axis=0)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    metrics.write_heatmap_csv(marginals, out / "edge_marginals.csv")
    write_adjacency(graphs[-1], out / "last_sample.txt")
    print(f"collected {len(graphs)} samples; marginals in {out / 'edge_marginals.csv'}")
    return 0


def cmd_evaluate(args) -> int:
    learned = read_adjacency(args.learned)
    truth = read_adjacency(args.truth_file)
    print(f"tpr={metrics.tpr(learned, truth)!r} spc={metrics.spc(learned, truth)!r} "
          f"spec_conventional={metrics.specificity_conventional(learned, truth)!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockdag",
                                     description="Ordered-block-model DAG structure learning")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate-data", help="forward-sample a dataset from a CPT network")
    _add_common_flags(p)
    p.add_argument("--n", type=int, help="number of rows (default config n_rows)")
    p.add_argument("--cpt-adjust", choices=["clamp", "resample"], default="clamp")
    p.set_defaults(func=cmd_simulate_data)

    p = sub.add_parser("sample-prior", help="draw graphs from a prior")
    _add_common_flags(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, default=10)
    p.set_defaults(func=cmd_sample_prior)

    p = sub.add_parser("score", help="score one graph against a dataset")
    _add_common_flags(p)
    p.add_argument("--graph", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("search", help="stochastic MAP search with full outputs")
    _add_common_flags(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("gibbs", help="Gibbs sampling of the graph posterior")
    _add_common_flags(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--thin", type=int, default=1)
    p.set_defaults(func=cmd_gibbs)

    p = sub.add_parser("evaluate", help="TPR/SPC of a learned graph vs truth")
    p.add_argument("--learned", required=True)
    p.add_argument("--truth", dest="truth_file", required=True)
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
