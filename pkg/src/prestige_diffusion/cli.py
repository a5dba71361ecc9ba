"""Command-line pipelines: rank, simulate, sweep, adopt, permtest, collapse.

Every flag may also be set through an environment variable named
``PDIFF_<FLAG>`` (upper case, dashes as underscores); explicit flags win.
Exit codes: 0 success, 2 input error, 3 invariant violation, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from contextlib import contextmanager
from pathlib import Path


from . import __version__, adoption, epidemic, formats, graph, prestige, stats
from .graph import InvariantError, LoadError

ENV_PREFIX = "PDIFF_"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INVARIANT = 3
EXIT_NUMERIC = 4


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as f:
            yield f


def _manifest(args, command, inputs, seed=None):
    if args.out in (None, "-"):
        return
    # worker count never changes output, so it is not part of the manifest
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command", "workers")}
    formats.RunManifest.build(command, params, inputs, seed).write_beside(args.out)


def _read_text(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise LoadError(f"cannot read file ({exc.strerror})", str(path)) from None


def _load_net(args):
    return graph.load_network(_read_text(args.vertices), _read_text(args.edges),
                              str(args.vertices), str(args.edges))


def _mvr_config(args):
    return prestige.MVRConfig(args.restarts, args.steps, args.master_seed)


# ---------------------------------------------------------------- commands


def cmd_rank(args):
    net = _load_net(args)
    scores = prestige.rank_network(net, _mvr_config(args), args.workers)
    with _output(args.out) as out:
        formats.write_prestige(net.labels, scores, out)
    if args.matrix_out:
        with _output(args.matrix_out) as out:
            graph.write_matrix_csv(graph.decile_density_matrix(net, scores), out)
    up = prestige.upward_fraction(net, scores)
    print(f"upward_fraction={formats.fmt(up)} best_violations={scores.best_violations} "
          f"samples_used={scores.samples_used}", file=sys.stderr)
    _manifest(args, "rank", {"vertices": args.vertices, "edges": args.edges}, args.master_seed)


def cmd_simulate(args):
    net = _load_net(args)
    cfg = epidemic.EpidemicConfig(args.p, args.q, args.trials, args.master_seed)
    cell = epidemic.mc_cell(net, args.seed_node, cfg)
    report = {
        "node": cell.node, "p": cell.p, "q": cell.q, "trials": cell.trials,
        "mean_size_frac": cell.mean_size_frac, "mean_length": cell.mean_length,
        "mean_length_norm": cell.mean_length_norm, "sd_size_frac": cell.sd_size_frac,
        "sd_length": cell.sd_length, "mean_jumps": cell.mean_jumps,
        "master_seed": args.master_seed,
    }
    with _output(args.out) as out:
        out.write(formats.dumps_json(report))
    _manifest(args, "simulate", {"vertices": args.vertices, "edges": args.edges}, args.master_seed)


def _sweep_prestige(args, net):
    if args.prestige:
        scores = formats.read_prestige(_read_text(args.prestige), args.prestige)
        if scores.mean_rank.size != net.N:
            raise LoadError("prestige file does not cover every node", args.prestige)
        return scores
    if args.rank:
        return prestige.rank_network(net, _mvr_config(args), args.workers)
    if net.vertex_pi is not None:
        return prestige.scores_from_vertex_pi(net)
    return None


def cmd_sweep(args):
    net = _load_net(args)
    p_grid = formats.parse_grid(args.p_grid)
    q_grid = formats.parse_grid(args.q_grid)
    if args.all_seeds:
        seeds = list(range(net.N))
    elif args.seed_nodes:
        seeds = [int(s) for s in args.seed_nodes.split(",")]
    else:
        raise LoadError("give --all-seeds or --seed-nodes", "<arguments>")
    scores = _sweep_prestige(args, net)
    result = epidemic.sweep(net, seeds, p_grid, q_grid, args.trials, args.master_seed, args.workers)
    with _output(args.out) as out:
        formats.write_sweep(result, out)
    if args.deciles_out:
        if scores is None:
            raise LoadError("--deciles-out needs --prestige, --rank, or a pi vertex column",
                            "<arguments>")
        with _output(args.deciles_out) as out:
            rows = []
            for q in q_grid:
                cv = stats.decile_curves(result, scores, q=q)
                for i, d in enumerate(cv.d):
                    for j, p in enumerate(cv.p):
                        rows.append([d, p, q, cv.y[i, j]])
            formats.write_csv(rows, ["decile", "p", "q", "mean_size_frac"], out)
    inputs = {"vertices": args.vertices, "edges": args.edges, "prestige": args.prestige}
    _manifest(args, "sweep", inputs, args.master_seed)


def _load_topic(args):
    name = args.topic or Path(args.keywords).stem
    return adoption.load_keywords(_read_text(args.keywords), name, str(args.keywords))


def _load_careers(args):
    return adoption.load_careers(_read_text(args.careers), str(args.careers))


def cmd_adopt(args):
    careers = _load_careers(args)
    topic = _load_topic(args)
    cls = adoption.classify_all(careers, topic, args.grace, args.ties, args.strict_subsequent)
    with _output(args.out) as out:
        formats.write_csv(([c.dept, c.kind, c.faculty_id or "", c.adoption_year] for c in cls),
                          ["dept_id", "classification", "adopter_faculty_id", "adoption_year"], out)
    if args.arrows_out:
        with _output(args.arrows_out) as out:
            formats.write_csv(adoption.transmission_arrows(cls, careers),
                              ["phd_institution", "job_institution", "year"], out)
    f = adoption.observed_hiring_fraction(cls)
    n_h = sum(c.kind == adoption.HIRING for c in cls)
    n_n = sum(c.kind == adoption.NON_HIRING for c in cls)
    print(f"topic={topic.name} f_obs={formats.fmt(f)} hiring={n_h} nonhiring={n_n} "
          f"departments={len(cls)}", file=sys.stderr)
    _manifest(args, "adopt", {"careers": args.careers, "keywords": args.keywords})


def cmd_permtest(args):
    careers = _load_careers(args)
    topic = _load_topic(args)
    res = stats.permutation_null(careers, topic, args.n_perms, args.master_seed, args.grace,
                                 args.ties, args.strict_subsequent, args.workers)
    report = {"topic": res.topic, "f_obs": res.f_obs, "f_exp_mean": res.f_exp_mean,
              "f_exp_sd": res.f_exp_sd, "p_value": res.p_value, "n_perms": res.n_perms,
              "resolution": res.resolution, "seed": res.seed}
    with _output(args.out) as out:
        out.write(formats.dumps_json(report))
    _manifest(args, "permtest", {"careers": args.careers, "keywords": args.keywords},
              args.master_seed)


def cmd_collapse(args):
    scores = formats.read_prestige(_read_text(args.prestige), args.prestige)
    result = formats.read_sweep(_read_text(args.sweep), scores.mean_rank.size, args.sweep)
    curves = stats.decile_curves(result, scores, q=args.q)
    rows = []
    for i, d in enumerate(curves.d):
        for j, p in enumerate(curves.p):
            p_star = stats.effective_p(p, d) if d < 1 else None
            rows.append([d, p, p_star, curves.y[i, j]])
    with _output(args.out) as out:
        formats.write_csv(rows, ["decile", "p", "p_star", "mean_size_frac"], out)
    fit = stats.fit_collapse(stats.collapse_points(curves))
    raw = stats.fit_logistic(stats.raw_points(curves))
    before, after = stats.collapse_dispersion(curves.raw(), curves.rescaled())
    report = {"r": fit.r, "k": fit.k, "residual": fit.residual,
              "raw_logistic_residual": raw.residual,
              "dispersion_before": before, "dispersion_after": after}
    with _output(args.fit_out) as out:
        out.write(formats.dumps_json(report))
    _manifest(args, "collapse", {"sweep": args.sweep, "prestige": args.prestige})


# ---------------------------------------------------------------- parser


def _bool_env(text):
    return str(text).strip().lower() in ("1", "true", "yes", "on")


def _apply_env(parser):
    for action in parser._actions:
        if not action.option_strings or action.dest in ("help",):
            continue
        val = os.environ.get(ENV_PREFIX + action.dest.upper())
        if val is None:
            continue
        if isinstance(action, argparse._StoreTrueAction):
            action.default = _bool_env(val)
        else:
            action.default = val
            action.required = False


def _common(p, seed_required=False):
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("--workers", type=int, default=1)
    if seed_required:
        p.add_argument("--master-seed", type=int, required=True)


def _network_args(p):
    p.add_argument("--vertices", required=True, help="vertex TSV: id, label[, pi]")
    p.add_argument("--edges", required=True, help="edge TSV: src, dst[, count]")


def _mvr_args(p):
    p.add_argument("--restarts", type=int, default=100)
    p.add_argument("--steps", type=int, default=50_000)


def _adopt_args(p):
    p.add_argument("--careers", required=True, help="JSON-lines career records")
    p.add_argument("--keywords", required=True, help="one keyword phrase per line")
    p.add_argument("--topic", default=None, help="topic name (default: keyword file stem)")
    p.add_argument("--grace", type=int, default=2)
    p.add_argument("--ties", choices=[adoption.NON_HIRING, adoption.HIRING],
                   default=adoption.NON_HIRING)
    p.add_argument("--strict-subsequent", action="store_true",
                   help="require an on-topic paper at or after hire_year + grace")


def build_parser():
    parser = argparse.ArgumentParser(prog="prestige-diffusion", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", help="minimum violation ranking prestige scores")
    _network_args(p)
    _mvr_args(p)
    _common(p, seed_required=True)
    p.add_argument("--matrix-out", default=None, help="10x10 decile density CSV")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("simulate", help="Monte Carlo summary for one seed node")
    _network_args(p)
    p.add_argument("--seed-node", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, default=0.0)
    p.add_argument("--trials", type=int, required=True)
    _common(p, seed_required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over seeds, p and q")
    _network_args(p)
    p.add_argument("--p-grid", required=True, help="a:b:step or comma list")
    p.add_argument("--q-grid", default="0:0:1")
    p.add_argument("--trials", type=int, required=True)
    seeds = p.add_mutually_exclusive_group()
    seeds.add_argument("--all-seeds", action="store_true")
    seeds.add_argument("--seed-nodes", default=None, help="comma-separated node ids")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--prestige", default=None, help="prestige CSV from `rank`")
    src.add_argument("--rank", action="store_true", help="compute prestige first")
    _mvr_args(p)
    p.add_argument("--deciles-out", default=None, help="per-decile mean Y/N CSV")
    _common(p, seed_required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("adopt", help="classify departments' topic adoptions")
    _adopt_args(p)
    p.add_argument("--arrows-out", default=None, help="hiring transmission arrows CSV")
    _common(p)
    p.set_defaults(func=cmd_adopt)

    p = sub.add_parser("permtest", help="title-shuffling permutation test")
    _adopt_args(p)
    p.add_argument("--n-perms", type=int, default=100)
    _common(p, seed_required=True)
    p.set_defaults(func=cmd_permtest)

    p = sub.add_parser("collapse", help="decile curves, p* rescaling and collapse fit")
    p.add_argument("--sweep", required=True, help="sweep CSV")
    p.add_argument("--prestige", required=True, help="prestige CSV")
    p.add_argument("--q", type=float, default=0.0, help="which q rows to use")
    p.add_argument("--fit-out", default=None, help="fit JSON path (default: <out>.fit.json)")
    _common(p)
    p.set_defaults(func=cmd_collapse)

    for sp in sub.choices.values():
        _apply_env(sp)
    _apply_env(parser)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "fit_out", "unset") is None:
        args.fit_out = "-" if args.out in (None, "-") else str(args.out) + ".fit.json"
    try:
        args.func(args)
    except LoadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (stats.FitError, stats.DegenerateDataError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
