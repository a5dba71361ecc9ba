#!/usr/bin/env python3
"""Permutation test on a corpus with planted hiring signal and on a null corpus.

    python scripts/permutation_demo.py --n-perms 100 --seed 0
"""

import argparse

from prestige_diffusion.adoption import classify_all, observed_hiring_fraction
from prestige_diffusion.stats import permutation_null
from prestige_diffusion.synthetic import DEMO_TOPIC, clustered_corpus, null_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-perms", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    corpora = {
        "clustered": clustered_corpus(seed=args.seed)[0],
        "null": null_corpus(seed=args.seed),
    }
    print(f"{'corpus':<10} {'depts':>5} {'f_obs':>7} {'f_exp':>7} {'sd':>6} {'p':>6}")
    for name, careers in corpora.items():
        cls = classify_all(careers, DEMO_TOPIC)
        res = permutation_null(careers, DEMO_TOPIC, args.n_perms, args.seed, workers=args.workers)
        assert abs(res.f_obs - observed_hiring_fraction(cls)) < 1e-12
        print(f"{name:<10} {len(cls):>5} {res.f_obs:>7.3f} {res.f_exp_mean:>7.3f} "
              f"{res.f_exp_sd:>6.3f} {res.p_value:>6.3f}")


if __name__ == "__main__":
    main()
