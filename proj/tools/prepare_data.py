#!/usr/bin/env python3
"""Build the Adult train/test CSV pair used by the bundled schemas.

The UCI release (adult.data + adult.test) is pooled, rows with "?" are
dropped (45,222 remain) and the pool is re-split so that the training part
has a fixed number of rows in every (label, sex, race) cell. The target
marginals below give 32,561 training and 12,661 test rows; within each cell
the rows are chosen by a seeded shuffle, and both outputs keep pooled order.
"""

import argparse
import csv
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education_num", "marital_status",
    "occupation", "relationship", "race", "sex", "capital_gain", "capital_loss",
    "hours_per_week", "native_country", "income",
]
SEXES = ["Female", "Male"]
RACES = ["Amer-Indian-Eskimo", "Asian-Pac-Islander", "Black", "Other", "White"]

# Training rows per label, by sex and by race (order as SEXES / RACES).
TRAIN_SEX = {">50K": [1196, 6912], "<=50K": [9352, 15101]}
TRAIN_RACE = {">50K": [37, 265, 402, 24, 7380], "<=50K": [275, 697, 2645, 222, 20614]}


def read_raw(path):
    rows = []
    with open(path, newline="") as fh:
        for fields in csv.reader(fh, skipinitialspace=True):
            if len(fields) != len(COLUMNS):
                continue  # blank lines and the "|1x3 Cross validator" banner
            fields = [f.strip() for f in fields]
            fields[-1] = fields[-1].rstrip(".")
            if "?" in fields:
                continue
            rows.append(fields)
    return rows


def cell_quotas(available, sex_totals, race_totals):
    """Integer table with the given margins, closest (L1) to proportional."""
    avail = np.asarray(available, dtype=float)
    share = sum(sex_totals) / avail.sum()
    target = avail * share
    ns, nr = avail.shape
    k = ns * nr
    # Variables: x (k), u (k) with u >= |x - target|.
    c = np.concatenate([np.zeros(k), np.ones(k)])
    a_ub, b_ub = [], []
    for i in range(k):
        row = np.zeros(2 * k); row[i] = 1; row[k + i] = -1
        a_ub.append(row); b_ub.append(target.flat[i])
        row = np.zeros(2 * k); row[i] = -1; row[k + i] = -1
        a_ub.append(row); b_ub.append(-target.flat[i])
    a_eq, b_eq = [], []
    for s in range(ns):
        row = np.zeros(2 * k); row[s * nr:(s + 1) * nr] = 1
        a_eq.append(row); b_eq.append(sex_totals[s])
    for r in range(nr):
        row = np.zeros(2 * k); row[r:k:nr] = 1
        a_eq.append(row); b_eq.append(race_totals[r])
    bounds = [(0, a) for a in avail.flat] + [(0, None)] * k
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds,
                  integrality=[1] * k + [0] * k, method="highs")
    if not res.success:
        raise SystemExit(f"no feasible split: {res.message}")
    quotas = np.rint(res.x[:k]).astype(int).reshape(ns, nr)
    assert quotas.sum(axis=1).tolist() == list(sex_totals)
    assert quotas.sum(axis=0).tolist() == list(race_totals)
    return quotas


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--raw", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "raw")
    parser.add_argument("--out", type=Path, required=True)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    pooled = read_raw(args.raw / "adult.data") + read_raw(args.raw / "adult.test")
    sex_col, race_col, label_col = COLUMNS.index("sex"), COLUMNS.index("race"), COLUMNS.index("income")

    rng = np.random.default_rng(args.seed)
    train = np.zeros(len(pooled), dtype=bool)
    for label in (">50K", "<=50K"):
        cells = {(s, r): [] for s in SEXES for r in RACES}
        for i, row in enumerate(pooled):
            if row[label_col] == label:
                cells[(row[sex_col], row[race_col])].append(i)
        available = [[len(cells[(s, r)]) for r in RACES] for s in SEXES]
        quotas = cell_quotas(available, TRAIN_SEX[label], TRAIN_RACE[label])
        for si, s in enumerate(SEXES):
            for ri, r in enumerate(RACES):
                members = np.array(cells[(s, r)], dtype=int)
                rng.shuffle(members)
                train[members[:quotas[si, ri]]] = True

    args.out.mkdir(parents=True, exist_ok=True)
    for name, mask in (("adult_train.csv", train), ("adult_test.csv", ~train)):
        with open(args.out / name, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(COLUMNS)
            writer.writerows(row for row, keep in zip(pooled, mask) if keep)
    print(f"pooled {len(pooled)} rows: {int(train.sum())} train, {int((~train).sum())} test", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
