#!/usr/bin/env python3
"""Solves an LP file produced by spkc and prints `status=... objective=...`.

Reads the subset of the CPLEX LP text format that spkc emits (an objective,
named rows, a Bounds section with `x <= 1` / `x = v` lines) and hands the
problem to scipy's HiGHS backend. Usable as the `--solve-with` command of
`spkc bench` and for solver round-trip checks.
"""

import sys

import numpy as np
from scipy import sparse
from scipy.optimize import linprog


def parse(path):
    sense = 1  # minimize
    obj = {}
    rows = []  # (terms, rel, rhs)
    upper = {}
    fixed = {}
    section = None
    cur = None  # current row terms while in constraints

    def finish_row():
        nonlocal cur
        if cur is not None:
            rows.append(cur)
            cur = None

    with open(path) as f:
        for raw in f:
            line = raw.strip()
            if not line or line.startswith("\\"):
                continue
            low = line.lower()
            if low in ("maximize", "minimize"):
                sense = -1 if low == "maximize" else 1
                section = "obj"
                continue
            if low == "subject to":
                section = "rows"
                continue
            if low == "bounds":
                finish_row()
                section = "bounds"
                continue
            if low == "end":
                finish_row()
                break

            if section == "obj":
                if line.startswith("obj:"):
                    line = line[4:]
                parse_terms(line, obj)
            elif section == "rows":
                if ":" in line and line.split(":", 1)[0].startswith("R"):
                    finish_row()
                    cur = [{}, None, None]
                    line = line.split(":", 1)[1]
                for rel in ("<=", ">=", "="):
                    if f" {rel} " in line:
                        body, rhs = line.rsplit(f" {rel} ", 1)
                        parse_terms(body, cur[0])
                        cur[1] = rel
                        cur[2] = float(rhs)
                        break
                else:
                    parse_terms(line, cur[0])
            elif section == "bounds":
                toks = line.split()
                if len(toks) == 3 and toks[1] == "<=":
                    upper[toks[0]] = float(toks[2])
                elif len(toks) == 3 and toks[1] == "=":
                    fixed[toks[0]] = float(toks[2])
    return sense, obj, rows, upper, fixed


def parse_terms(text, into):
    toks = text.split()
    sign = 1.0
    coef = None
    for tok in toks:
        if tok == "+":
            sign, coef = 1.0, None
        elif tok == "-":
            sign, coef = -1.0, None
        else:
            try:
                coef = float(tok)
            except ValueError:
                into[tok] = into.get(tok, 0.0) + sign * (1.0 if coef is None else coef)
                sign, coef = 1.0, None


def main():
    if len(sys.argv) != 2:
        print("usage: solve_lp.py FILE.lp", file=sys.stderr)
        return 2
    sense, obj, rows, upper, fixed = parse(sys.argv[1])

    names = {}

    def vid(name):
        if name not in names:
            names[name] = len(names)
        return names[name]

    for terms, _, _ in rows:
        for n in terms:
            vid(n)
    for n in list(obj) + list(upper) + list(fixed):
        vid(n)
    nvar = len(names)

    c = np.zeros(nvar)
    for n, v in obj.items():
        c[names[n]] = sense * v

    def build(selected):
        data, ri, ci, rhs = [], [], [], []
        for terms, _, b in selected:
            r = len(rhs)
            rhs.append(b)
            for n, v in terms.items():
                ri.append(r)
                ci.append(names[n])
                data.append(v)
        if not rhs:
            return None, None
        return sparse.csr_matrix((data, (ri, ci)), shape=(len(rhs), nvar)), np.array(rhs)

    ub_rows = [(t, rel, b) for t, rel, b in rows if rel == "<="]
    ub_rows += [({n: -v for n, v in t.items()}, "<=", -b) for t, rel, b in rows if rel == ">="]
    eq_rows = [(t, rel, b) for t, rel, b in rows if rel == "="]
    A_ub, b_ub = build(ub_rows)
    A_eq, b_eq = build(eq_rows)

    bounds = [None] * nvar
    for n, i in names.items():
        if n in fixed:
            bounds[i] = (fixed[n], fixed[n])
        else:
            bounds[i] = (0.0, upper.get(n, None))

    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status == 0:
        print(f"status=optimal objective={sense * res.fun:.6f}")
        return 0
    print(f"status={res.status} objective=nan")
    return 1


if __name__ == "__main__":
    sys.exit(main())
