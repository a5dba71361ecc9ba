#!/usr/bin/env python3
"""Generate the plot data behind the prestige/epidemic figures.

Writes CSV/JSON tables only (no rendering) for a network given as vertex
and edge TSV files, or for the built-in synthetic hierarchy:

  decile_density.csv     10x10 edge density between prestige deciles
  closeness.csv          prestige vs mean geodesic length inside the largest SCC
  size_vs_prestige.csv   mean Y/N and L/ell per node at each p, with logistic fits
  jumps.csv              mean Y/N per node at fixed p for several q
  collapse.csv           decile curves in p and p*, plus collapse_fit.json

    python scripts/reproduce_figures.py --out figs --trials 1000 --master-seed 0
"""

import argparse
import json
import time
from pathlib import Path

import numpy as np

from prestige_diffusion import epidemic, formats, graph, prestige, stats
from prestige_diffusion.synthetic import core_periphery_hierarchy

P_GRID = [0.01, 0.02, 0.04, 0.06, 0.08, 0.1, 0.15, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0]


def load(args):
    if args.vertices:
        net = graph.load_network_files(args.vertices, args.edges)
    else:
        net, _ = core_periphery_hierarchy(seed=args.network_seed)
    if net.vertex_pi is not None and not args.rerank:
        return net, prestige.scores_from_vertex_pi(net)
    cfg = prestige.MVRConfig(args.restarts, args.steps, args.master_seed)
    return net, prestige.rank_network(net, cfg, args.workers)


def closeness_table(net, scores):
    sub, old = graph.largest_scc(net)
    rows = []
    for i in range(sub.N):
        ell = graph.mean_geodesic_length(sub, i)
        if ell is not None:
            rows.append([int(old[i]), scores.mean_rank[old[i]], ell])
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vertices")
    ap.add_argument("--edges")
    ap.add_argument("--network-seed", type=int, default=0)
    ap.add_argument("--out", required=True)
    ap.add_argument("--trials", type=int, required=True)
    ap.add_argument("--master-seed", type=int, required=True)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--restarts", type=int, default=100)
    ap.add_argument("--steps", type=int, default=50_000)
    ap.add_argument("--rerank", action="store_true", help="ignore a pi vertex column")
    ap.add_argument("--jump-p", type=float, default=0.1)
    ap.add_argument("--q-grid", default="0,0.1,0.5,1")
    args = ap.parse_args()
    if bool(args.vertices) != bool(args.edges):
        ap.error("--vertices and --edges go together")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    net, scores = load(args)
    with open(out / "prestige.csv", "w") as f:
        formats.write_prestige(net.labels, scores, f)
    with open(out / "decile_density.csv", "w") as f:
        graph.write_matrix_csv(graph.decile_density_matrix(net, scores), f)
    with open(out / "closeness.csv", "w") as f:
        formats.write_csv(closeness_table(net, scores), ["node", "mean_rank", "mean_geodesic"], f)

    res = epidemic.sweep(net, range(net.N), P_GRID, [0.0], args.trials, args.master_seed, args.workers)
    with open(out / "sweep.csv", "w") as f:
        formats.write_sweep(res, f)
    rows, fits = [], {}
    for p in P_GRID:
        cells = sorted(res.filter(p=p).rows, key=lambda r: scores.mean_rank[r.node])
        x = np.array([scores.mean_rank[r.node] for r in cells])
        y = np.array([r.mean_size_frac for r in cells])
        smooth = stats.lowess(x, y, frac=0.3) if np.ptp(x) > 0 else y
        for r, s in zip(cells, smooth):
            rows.append([r.node, scores.mean_rank[r.node], p, r.mean_size_frac, s, r.mean_length_norm])
        try:
            fit = stats.fit_logistic(np.column_stack([x, y]))
            fits[str(p)] = {"y_max": fit.y_max, "k": fit.k, "pi_mid": fit.pi_mid,
                            "residual": fit.residual}
        except (stats.DegenerateDataError, stats.FitError) as exc:
            fits[str(p)] = {"error": str(exc)}
    with open(out / "size_vs_prestige.csv", "w") as f:
        formats.write_csv(rows, ["node", "mean_rank", "p", "mean_size_frac", "lowess",
                                 "mean_length_norm"], f)
    (out / "logistic_fits.json").write_text(formats.dumps_json(fits))

    q_grid = formats.parse_grid(args.q_grid)
    jumps = epidemic.sweep(net, range(net.N), [args.jump_p], q_grid, args.trials,
                           args.master_seed, args.workers)
    with open(out / "jumps.csv", "w") as f:
        formats.write_csv(([r.node, scores.mean_rank[r.node], r.q, r.mean_size_frac, r.mean_jumps]
                           for r in jumps.rows),
                          ["node", "mean_rank", "q", "mean_size_frac", "mean_jumps"], f)

    cv = stats.decile_curves(res, scores)
    crow = []
    for i, d in enumerate(cv.d):
        for j, p in enumerate(cv.p):
            crow.append([d, p, stats.effective_p(p, d) if d < 1 else None, cv.y[i, j]])
    with open(out / "collapse.csv", "w") as f:
        formats.write_csv(crow, ["decile", "p", "p_star", "mean_size_frac"], f)
    col = stats.fit_collapse(stats.collapse_points(cv))
    raw = stats.fit_logistic(stats.raw_points(cv))
    before, after = stats.collapse_dispersion(cv.raw(), cv.rescaled())
    summary = {"r": col.r, "k": col.k, "residual": col.residual,
               "raw_logistic_residual": raw.residual,
               "dispersion_before": before, "dispersion_after": after,
               "upward_fraction": prestige.upward_fraction(net, scores),
               "placement_concentration": graph.placement_concentration(net)}
    (out / "collapse_fit.json").write_text(formats.dumps_json(summary))
    print(json.dumps({k: round(v, 4) if isinstance(v, float) else v for k, v in summary.items()}))
    print(f"done in {time.perf_counter() - t0:.0f}s -> {out}")


if __name__ == "__main__":
    main()
