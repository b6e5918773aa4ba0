"""Aggregate a sweep CSV (from ``robustpoly experiment``) per parameter cell."""

import argparse

import pandas as pd


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv")
    args = ap.parse_args()
    df = pd.read_csv(args.csv)
    keys = ["degree", "rho", "sigma", "measure", "adversary"]
    out = df.groupby(keys).agg(
        trials=("trial", "count"),
        good_rate=("alpha_good", "mean"),
        l1_linf=("l1_err_linf", "median"),
        final_linf=("final_err_linf", "median"),
        final_linf_max=("final_err_linf", "max"),
    )
    out["bound"] = (2 + df["epsilon"].iloc[0]) * out.index.get_level_values("sigma")
    print(out.to_string())


if __name__ == "__main__":
    main()
