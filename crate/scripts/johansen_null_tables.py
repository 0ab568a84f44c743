"""Simulate asymptotic null distributions of the Johansen trace and
max-eigenvalue statistics for the five deterministic cases.

The limiting functional int dB F' (int F F')^-1 int F dB' is discretised on
T steps with Gaussian increments. Output: 90/95/99% quantiles plus the mean
and variance of each statistic, for n - r = 1..12, printed as Rust arrays.

usage: python3 scripts/johansen_null_tables.py REPS T SEED
"""
import sys

import numpy as np


def regressors(w, t, case, m):
    # w: (B, T, m) random walks lagged one step; t: (T,) time index
    b, n, _ = w.shape
    ones = np.ones((b, n, 1))
    trend = np.broadcast_to(t[None, :, None], (b, n, 1))
    if case == 1:
        return w
    if case == 2:
        return np.concatenate([w, ones], axis=2)
    if case == 3:
        f = np.concatenate([w[:, :, : m - 1], trend], axis=2)
        return f - f.mean(axis=1, keepdims=True)
    if case == 4:
        f = np.concatenate([w, trend], axis=2)
        return f - f.mean(axis=1, keepdims=True)
    if case == 5:
        f = np.concatenate([w[:, :, : m - 1], trend**2], axis=2)
        z = np.stack([np.ones(n), t], axis=1)
        proj = z @ np.linalg.solve(z.T @ z, z.T)
        return f - np.einsum("ij,bjk->bik", proj, f)
    raise ValueError(case)


def main():
    reps, steps, seed = int(sys.argv[1]), int(sys.argv[2]), int(sys.argv[3])
    rng = np.random.default_rng(seed)
    chunk = max(1, min(2000, 4_000_000 // steps))
    t = np.arange(steps, dtype=float) / steps
    out = {}
    for m in range(1, 13):
        stats = {(c, k): [] for c in range(1, 6) for k in ("trace", "max")}
        done = 0
        while done < reps:
            b = min(chunk, reps - done)
            eps = rng.standard_normal((b, steps, m))
            w = np.cumsum(eps, axis=1) / np.sqrt(steps)
            w = np.concatenate([np.zeros((b, 1, m)), w[:, :-1, :]], axis=1)
            for case in range(1, 6):
                f = regressors(w, t, case, m)
                sfe = np.einsum("btk,btj->bkj", f, eps)
                sff = np.einsum("btk,btj->bkj", f, f)
                q = np.einsum("bkj,bkl->bjl", sfe, np.linalg.solve(sff, sfe))
                ev = np.linalg.eigvalsh(0.5 * (q + np.transpose(q, (0, 2, 1))))
                stats[(case, "trace")].append(ev.sum(axis=1))
                stats[(case, "max")].append(ev[:, -1])
            done += b
        for key, vals in stats.items():
            v = np.concatenate(vals)
            out[key + (m,)] = (
                np.quantile(v, [0.90, 0.95, 0.99]).tolist(),
                float(v.mean()),
                float(v.var()),
            )
        print(f"# m={m} done", file=sys.stderr, flush=True)
    for case in range(1, 6):
        for kind in ("trace", "max"):
            print(f"// case {case} {kind}: [q90, q95, q99, mean, var]")
            for m in range(1, 13):
                q, mean, var = out[(case, kind, m)]
                row = ", ".join(f"{x:.4f}" for x in q + [mean, var])
                print(f"    [{row}],")


if __name__ == "__main__":
    main()
