#!/usr/bin/env python3
"""Write a synthetic hiring network and careers corpus in the CLI's file formats.

    python scripts/make_synthetic_data.py --out data/synthetic --seed 0
"""

import argparse
from pathlib import Path

from prestige_diffusion.adoption import dump_careers
from prestige_diffusion.graph import write_network
from prestige_diffusion.synthetic import DEMO_TOPIC, clustered_corpus, core_periphery_hierarchy, null_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--nodes", type=int, default=205)
    ap.add_argument("--edges", type=int, default=5032)
    ap.add_argument("--up-fraction", type=float, default=0.23)
    ap.add_argument("--departments", type=int, default=120)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    net, true_rank = core_periphery_hierarchy(args.nodes, args.edges, args.up_fraction, seed=args.seed)
    with open(out / "vertices.tsv", "w") as fv, open(out / "edges.tsv", "w") as fe:
        write_network(net, fv, fe, aggregate=True)
    with open(out / "planted_rank.tsv", "w") as f:
        for i, r in enumerate(true_rank.tolist()):
            f.write(f"{i}\t{r}\n")

    careers, _ = clustered_corpus(args.departments, seed=args.seed, n_institutions=args.nodes)
    with open(out / "careers_clustered.jsonl", "w") as f:
        dump_careers(careers, f)
    with open(out / "careers_null.jsonl", "w") as f:
        dump_careers(null_corpus(seed=args.seed, n_institutions=args.nodes), f)
    (out / "topic_modeling.txt").write_text(
        "# demo keyword list\n" + "\n".join(DEMO_TOPIC.keywords) + "\n")
    print(f"wrote {net.N} nodes, {net.n_edges} placements, {len(careers)} careers to {out}")


if __name__ == "__main__":
    main()
