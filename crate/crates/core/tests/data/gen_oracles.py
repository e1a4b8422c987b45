"""Regenerates the frozen oracle values used by the test suites.

Independent reference: scipy.signal (butter, filtfilt) and scipy.stats
(ttest_rel, shapiro). Run with `python3 gen_oracles.py` from this directory.
"""
import json

import numpy as np
from scipy import signal, stats


def filter_cases(rng):
    b, a = signal.butter(4, 0.05)
    cases = []
    for i in range(20):
        n = int(rng.integers(8, 400)) if i % 5 else int(rng.integers(2, 16))
        x = np.cumsum(rng.normal(0.0, 1.0, n)) * 0.1 + rng.normal(0.0, 0.05, n)
        padlen = min(15, n - 1)
        y = signal.filtfilt(b, a, x, padtype="odd", padlen=padlen)
        cases.append({"input": x.tolist(), "expected": y.tolist()})
    return {"b": b.tolist(), "a": a.tolist(), "cases": cases}


def stats_cases(rng):
    cases = []
    for i in range(20):
        n = int(rng.integers(5, 51))
        a = rng.normal(0.0, 1.0, n)
        b = a + rng.normal(0.3 * (i % 3 - 1), 1.0, n)
        if i % 4 == 0:
            b = b + rng.exponential(1.0, n)
        t = stats.ttest_rel(a, b)
        w = stats.shapiro(a - b)
        cases.append({
            "a": a.tolist(),
            "b": b.tolist(),
            "t": float(t.statistic),
            "p": float(t.pvalue),
            "df": int(n - 1),
            "w": float(w.statistic),
            "w_p": float(w.pvalue),
        })
    return cases


def shapiro_examples():
    q = stats.norm.ppf((np.arange(1, 21) - 0.375) / 20.25)
    out = {}
    for name, x in [
        ("normal_quantiles_20", q),
        ("grid_1_10", np.arange(1.0, 11.0)),
        ("quantiles_plus_outlier", np.append(q, 100.0)),
        ("n3", np.array([1.0, 2.0, 4.0])),
        ("n4", np.array([0.3, 1.1, 1.9, 5.0])),
        ("n7", np.array([2.1, 0.4, -1.2, 3.3, 0.0, 0.9, 1.5])),
        ("n12", np.linspace(-1.0, 1.0, 12) ** 3),
    ]:
        r = stats.shapiro(x)
        out[name] = {"x": x.tolist(), "w": float(r.statistic), "p": float(r.pvalue)}
    return out


def main():
    rng = np.random.default_rng(20240917)
    with open("filter_oracle.json", "w") as f:
        json.dump(filter_cases(rng), f, indent=1)
    with open("stats_oracle.json", "w") as f:
        json.dump({"paired": stats_cases(rng), "shapiro": shapiro_examples()}, f, indent=1)


if __name__ == "__main__":
    main()
