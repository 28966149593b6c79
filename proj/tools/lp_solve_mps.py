#!/usr/bin/env python3
"""Solve a fixed-format MPS linear program and write a plain-text solution.

Usage:
    lp_solve_mps.py MODEL.mps SOLUTION.txt
    lp_solve_mps.py MODEL.mps --dump-structure STRUCTURE.json

The solution file carries a status line, an objective line, and one
"<column> <value>" pair per line. The structure dump re-serializes the
parsed model for structural comparisons by other tools.
"""

import json
import math
import sys

INF = math.inf


class Model:
    def __init__(self):
        self.obj_row = None
        self.rows = []        # (name, sense) with sense in {L, G, E}
        self.row_index = {}
        self.rhs = {}
        self.cols = []        # column names in first-seen order
        self.col_index = {}
        self.obj = {}         # col -> coefficient
        self.entries = {}     # (row, col) -> coefficient
        self.lb = {}
        self.ub = {}
        self.lb_set = set()


def parse_mps(path):
    model = Model()
    section = None
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line or line.startswith("*"):
                continue
            if not line[0].isspace():
                head = line.split()[0]
                if head == "NAME":
                    continue
                if head in ("ROWS", "COLUMNS", "RHS", "BOUNDS", "RANGES", "ENDATA"):
                    if head == "RANGES":
                        raise ValueError("RANGES section not supported")
                    section = head
                    if head == "ENDATA":
                        break
                    continue
                raise ValueError(f"unknown section {head}")
            fields = line.split()
            if section == "ROWS":
                sense, name = fields
                if sense == "N":
                    if model.obj_row is None:
                        model.obj_row = name
                    continue
                if sense not in ("L", "G", "E"):
                    raise ValueError(f"bad row sense {sense}")
                model.row_index[name] = len(model.rows)
                model.rows.append((name, sense))
            elif section == "COLUMNS":
                col = fields[0]
                if col not in model.col_index:
                    model.col_index[col] = len(model.cols)
                    model.cols.append(col)
                for k in range(1, len(fields) - 1, 2):
                    row, value = fields[k], float(fields[k + 1])
                    if row == model.obj_row:
                        model.obj[col] = model.obj.get(col, 0.0) + value
                    else:
                        if row not in model.row_index:
                            raise ValueError(f"entry for unknown row {row}")
                        key = (row, col)
                        model.entries[key] = model.entries.get(key, 0.0) + value
            elif section == "RHS":
                for k in range(1, len(fields) - 1, 2):
                    model.rhs[fields[k]] = float(fields[k + 1])
            elif section == "BOUNDS":
                kind, _, col = fields[0], fields[1], fields[2]
                value = float(fields[3]) if len(fields) > 3 else 0.0
                if kind == "LO":
                    model.lb[col] = value
                    model.lb_set.add(col)
                elif kind == "UP":
                    model.ub[col] = value
                    if value < 0.0 and col not in model.lb_set:
                        model.lb[col] = -INF
                elif kind == "FX":
                    model.lb[col] = value
                    model.ub[col] = value
                    model.lb_set.add(col)
                elif kind == "FR":
                    model.lb[col] = -INF
                    model.ub[col] = INF
                elif kind == "MI":
                    model.lb[col] = -INF
                elif kind == "PL":
                    model.ub[col] = INF
                else:
                    raise ValueError(f"unsupported bound kind {kind}")
            else:
                raise ValueError("data line outside any section")
    if section != "ENDATA":
        raise ValueError("missing ENDATA")
    return model


def dump_structure(model, path):
    structure = {
        "columns": [
            [
                c,
                model.lb.get(c, 0.0),
                model.ub.get(c, INF),
                model.obj.get(c, 0.0),
            ]
            for c in model.cols
        ],
        "rows": [
            [
                name,
                sense,
                model.rhs.get(name, 0.0),
                sorted(
                    [c, v]
                    for (r, c), v in model.entries.items()
                    if r == name
                ),
            ]
            for name, sense in model.rows
        ],
    }

    def encode(value):
        if value == INF:
            return "inf"
        if value == -INF:
            return "-inf"
        return value

    structure["columns"] = [
        [c, encode(lb), encode(ub), obj] for c, lb, ub, obj in structure["columns"]
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(structure, fh, indent=1, sort_keys=True)
        fh.write("\n")


def solve(model, out_path):
    import numpy as np
    from scipy import sparse
    from scipy.optimize import linprog

    n = len(model.cols)
    c = np.zeros(n)
    for col, value in model.obj.items():
        c[model.col_index[col]] = value

    ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []
    data_ub, ri_ub, ci_ub = [], [], []
    data_eq, ri_eq, ci_eq = [], [], []
    for name, sense in model.rows:
        rhs = model.rhs.get(name, 0.0)
        if sense == "E":
            eq_rows.append(name)
            eq_rhs.append(rhs)
        else:
            ub_rows.append((name, sense))
            ub_rhs.append(rhs if sense == "L" else -rhs)
    ub_index = {name: i for i, (name, _) in enumerate(ub_rows)}
    eq_index = {name: i for i, name in enumerate(eq_rows)}
    for (row, col), value in model.entries.items():
        j = model.col_index[col]
        if row in eq_index:
            data_eq.append(value)
            ri_eq.append(eq_index[row])
            ci_eq.append(j)
        else:
            i = ub_index[row]
            sign = 1.0 if ub_rows[i][1] == "L" else -1.0
            data_ub.append(sign * value)
            ri_ub.append(i)
            ci_ub.append(j)

    a_ub = sparse.csr_matrix((data_ub, (ri_ub, ci_ub)), shape=(len(ub_rows), n))
    a_eq = sparse.csr_matrix((data_eq, (ri_eq, ci_eq)), shape=(len(eq_rows), n))
    bounds = [
        (
            None if model.lb.get(col, 0.0) == -INF else model.lb.get(col, 0.0),
            None if model.ub.get(col, INF) == INF else model.ub.get(col, INF),
        )
        for col in model.cols
    ]

    res = linprog(
        c,
        A_ub=a_ub if len(ub_rows) else None,
        b_ub=np.array(ub_rhs) if len(ub_rows) else None,
        A_eq=a_eq if len(eq_rows) else None,
        b_eq=np.array(eq_rhs) if len(eq_rows) else None,
        bounds=bounds,
        method="highs",
    )
    status_map = {0: "optimal", 1: "limit", 2: "infeasible", 3: "unbounded", 4: "error"}
    status = status_map.get(res.status, "error")

    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(f"status {status}\n")
        fh.write(f"objective {res.fun if res.status == 0 else 0.0:.17g}\n")
        if res.status == 0:
            for col, x in zip(model.cols, res.x):
                fh.write(f"{col} {x:.17g}\n")


def main(argv):
    if len(argv) != 3:
        sys.stderr.write(__doc__)
        return 2
    model = parse_mps(argv[1])
    if argv[2].startswith("--dump-structure"):
        raise ValueError("--dump-structure needs an output path")
    if argv[1] == "--dump-structure":
        raise ValueError("--dump-structure comes after the model path")
    solve(model, argv[2])
    return 0


if __name__ == "__main__":
    if len(sys.argv) == 4 and sys.argv[2] == "--dump-structure":
        dump_structure(parse_mps(sys.argv[1]), sys.argv[3])
        sys.exit(0)
    sys.exit(main(sys.argv))
