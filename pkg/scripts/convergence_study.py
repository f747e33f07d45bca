"""RMSE convergence study: prints one slope per (integrand, sampler) and optionally writes CSV rows.

Usage: python scripts/convergence_study.py [--m-max 14] [--randomizations 100] [--out rows.csv]
"""

import argparse
import csv

from qmcfast.study import StudyConfig, run_study


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--integrands", nargs="+", default=["simple-d1", "simple-d2", "g-function", "oakley"])
    p.add_argument("--samplers", nargs="+", default=["iid", "lattice", "dnet-lms", "dnet-ho"])
    p.add_argument("--m-min", type=int, default=4)
    p.add_argument("--m-max", type=int, default=14)
    p.add_argument("--randomizations", type=int, default=100)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None)
    a = p.parse_args()
    cfg = StudyConfig(integrands=tuple(a.integrands), samplers=tuple(a.samplers), m_min=a.m_min,
                      m_max=a.m_max, randomizations=a.randomizations, seed=a.seed, threads=a.threads)
    rows, slopes = run_study(cfg)
    for (name, sampler), s in slopes.items():
        print(f"{name:12s} {sampler:10s} slope {s:+.3f}")
    if a.out:
        with open(a.out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)


if __name__ == "__main__":
    main()
