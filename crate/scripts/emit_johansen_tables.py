"""Assemble the embedded Johansen tables from published values and the
simulation output of johansen_null_tables.py.

usage: python3 scripts/emit_johansen_tables.py SIM_OUTPUT > tables_fragment.rs

Quantiles: published values for cases 1, 3 and 5 (the 5% column of case 3
replaced by the more precise printed figures below); simulated values for
cases 2 and 4. Moments: simulated for every case.

The discretised functional is biased low by a factor growing with n - r
(about 2.5% at n - r = 12 with 500 steps). Each simulated case is rescaled
by f = published q95 / simulated q95; cases 2 and 4, which have no
published counterpart here, use the mean of f over cases 1, 3 and 5.
Means scale by f, variances by f^2.
"""
import re
import sys

from statsmodels.tsa import coint_tables as ct

CASE3_TRACE_5 = [3.841465, 15.49471, 29.79707, 47.85613, 69.81889, 95.75366,
                 125.6154, 159.5297, 197.3709, 239.2354, 285.1425, 334.9837]
CASE3_MAX_5 = [3.841465, 14.26460, 21.13162, 27.58434, 33.87687, 40.07757,
               46.23142, 52.36261, 58.43354, 64.50472, 70.53513, 76.57843]


def parse(path):
    sim = {}
    key = None
    for line in open(path):
        m = re.match(r"// case (\d) (trace|max):", line)
        if m:
            key = (int(m.group(1)), m.group(2))
            sim[key] = []
        elif line.strip().startswith("["):
            sim[key].append([float(x) for x in line.strip().strip("[],").split(",")])
    return sim


def main():
    sim = parse(sys.argv[1])
    published = {
        (1, "trace"): ct.tjcp0, (3, "trace"): ct.tjcp1, (5, "trace"): ct.tjcp2,
        (1, "max"): ct.ejcp0, (3, "max"): ct.ejcp1, (5, "max"): ct.ejcp2,
    }
    factor = {}
    for kind in ("trace", "max"):
        for case in (1, 3, 5):
            for m in range(12):
                factor[(case, kind, m)] = published[(case, kind)][m][1] / sim[(case, kind)][m][1]
        for case in (2, 4):
            for m in range(12):
                factor[(case, kind, m)] = sum(factor[(c, kind, m)] for c in (1, 3, 5)) / 3
    for kind, name in (("trace", "TRACE"), ("max", "MAX")):
        print(f"/// `[case][n - r - 1]` = `[10%, 5%, 1%]`.")
        print(f"pub(crate) const JOHANSEN_{name}_CV: [[[f64; 3]; 12]; 5] = [")
        for case in range(1, 6):
            print("    [")
            for m in range(12):
                if (case, kind) in published:
                    row = list(published[(case, kind)][m])
                    if case == 3:
                        row[1] = (CASE3_TRACE_5 if kind == "trace" else CASE3_MAX_5)[m]
                else:
                    row = [float(round(x * factor[(case, kind, m)], 4)) for x in sim[(case, kind)][m][:3]]
                print("        [" + ", ".join(repr(float(x)) for x in row) + "],")
            print("    ],")
        print("];")
    for kind, name in (("trace", "TRACE"), ("max", "MAX")):
        print(f"/// `[case][n - r - 1]` = `[mean, variance]` of the limiting distribution.")
        print(f"pub(crate) const JOHANSEN_{name}_MOMENTS: [[[f64; 2]; 12]; 5] = [")
        for case in range(1, 6):
            print("    [")
            for m in range(12):
                f = factor[(case, kind, m)]
                mean, var = sim[(case, kind)][m][3:]
                print(f"        [{float(round(mean * f, 4))!r}, {float(round(var * f * f, 4))!r}],")
            print("    ],")
        print("];")


if __name__ == "__main__":
    main()
