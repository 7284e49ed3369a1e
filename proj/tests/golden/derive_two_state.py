"""Independent derivation of the two_state.json golden value.

Both ambiguity sets in the model only constrain the mean of a distribution on
the segment {(t, 1 - t)}, so the adversary picks t in an interval [lo, hi].
Each stage problem is then a matrix game against the two interval endpoints,
solved here with scipy's linprog.
"""
import json
import sys

import numpy as np
from scipy.optimize import linprog


def wasserstein_interval(samples, theta):
    # moved points t_n in [0, 1], (1/N) sum 2 |t_n - s_n| <= theta
    s = np.array([x[0] for x in samples])
    n = len(s)
    out = []
    for sign in (1.0, -1.0):
        # variables t (n), u (n) with u >= |t - s|
        c = np.concatenate([sign * np.ones(n) / n, np.zeros(n)])
        A = []
        b = []
        for i in range(n):
            row = np.zeros(2 * n); row[i] = 1; row[n + i] = -1; A.append(row); b.append(s[i])
            row = np.zeros(2 * n); row[i] = -1; row[n + i] = -1; A.append(row); b.append(-s[i])
        A.append(np.concatenate([np.zeros(n), 2 * np.ones(n) / n])); b.append(theta)
        bounds = [(0, 1)] * n + [(0, None)] * n
        r = linprog(c, A_ub=np.array(A), b_ub=np.array(b), bounds=bounds, method="highs")
        out.append(sign * r.fun)
    return out


def tv_interval(samples, theta):
    s = np.array([x[0] for x in samples])
    n = len(s)
    out = []
    for sign in (1.0, -1.0):
        c = np.concatenate([sign * s, np.zeros(n)])
        A = []
        b = []
        for i in range(n):
            row = np.zeros(2 * n); row[i] = 1; row[n + i] = -1; A.append(row); b.append(1 / n)
            row = np.zeros(2 * n); row[i] = -1; row[n + i] = -1; A.append(row); b.append(-1 / n)
        A.append(np.concatenate([np.zeros(n), np.ones(n)])); b.append(theta)
        Aeq = [np.concatenate([np.ones(n), np.zeros(n)])]
        r = linprog(c, A_ub=np.array(A), b_ub=np.array(b), A_eq=np.array(Aeq), b_eq=[1.0],
                    bounds=[(0, None)] * (2 * n), method="highs")
        out.append(sign * r.fun)
    return out


def stage_value(state, v_next, interval):
    fm = state["factor_map"]
    P = np.array(fm["P"], dtype=float)
    R = np.array(fm["R"], dtype=float)
    r0 = np.array(fm["r0"], dtype=float)
    A = len(state["actions"])
    S = len(state["successors"])

    def payoff(t):
        xi = np.array([t, 1 - t])
        return np.array([r0[a] + R[a] @ xi + sum((P[a * S + j] @ xi) * v_next[j] for j in range(S))
                         for a in range(A)])

    # max z s.t. z <= pi . payoff(t) at both endpoints, pi on the simplex
    rows = [np.concatenate([-payoff(t), [1.0]]) for t in interval]
    r = linprog(np.concatenate([np.zeros(A), [-1.0]]), A_ub=np.array(rows), b_ub=np.zeros(2),
                A_eq=[np.concatenate([np.ones(A), [0.0]])], b_eq=[1.0],
                bounds=[(0, None)] * A + [(None, None)], method="highs")
    return -r.fun


def main(path):
    model = json.load(open(path))
    states = model["states"]
    intervals = []
    for st in states:
        a = st["ambiguity"]
        if a["builder"] == "wasserstein":
            intervals.append(wasserstein_interval(a["samples"], a["theta"]))
        else:
            intervals.append(tv_interval(a["samples"], a["theta"]))
    # successors are the same two states everywhere
    v = [st.get("terminal", 0.0) for st in states]
    for _ in range(model["horizon"]["periods"]):
        v = [stage_value(st, v, intervals[i]) for i, st in enumerate(states)]
    print(json.dumps({"initial_state": model["initial"] + "@1", "value": v[0]}, indent=2))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "models/two_state.json")
