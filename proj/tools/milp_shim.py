#!/usr/bin/env python3
"""Solve MPS models with HiGHS (highspy) or scipy.optimize.milp.

Reads a job file with one "model_path<TAB>solution_path" pair per line and
writes one solution file per job:

    engine highspy
    status Optimal|Feasible|Infeasible|TimeLimit|Error
    objective <float>
    bound <float>
    gap <float>
    wall_time <seconds>
    values <n>
    <column name> <value>
    ...

Exit codes: 0 all jobs attempted, 3 no engine available, 4 bad arguments.
"""

import argparse
import math
import sys
import time

NAN = float("nan")


def fmt(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def write_solution(path, engine, status, objective, bound, gap, wall, names, values, message=""):
    with open(path, "w") as out:
        out.write(f"engine {engine}\n")
        out.write(f"status {status}\n")
        if message:
            out.write(f"message {message.replace(chr(10), ' ')}\n")
        out.write(f"objective {fmt(objective)}\n")
        out.write(f"bound {fmt(bound)}\n")
        out.write(f"gap {fmt(gap)}\n")
        out.write(f"wall_time {fmt(wall)}\n")
        if values is None:
            out.write("values 0\n")
        else:
            out.write(f"values {len(values)}\n")
            for name, v in zip(names, values):
                out.write(f"{name} {fmt(v)}\n")


# ---------------------------------------------------------------- highspy


def have_highspy():
    try:
        import highspy  # noqa: F401
        return True
    except ImportError:
        return False


def solve_highspy(model_path, opts):
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", True)
    h.setOptionValue("log_to_console", True)
    h.setOptionValue("time_limit", float(opts.time_limit))
    h.setOptionValue("mip_rel_gap", float(opts.gap))
    h.setOptionValue("threads", int(opts.threads))
    h.setOptionValue("random_seed", int(opts.seed) % 2147483647)
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    h.setOptionValue("mip_feasibility_tolerance", 1e-7)
    if h.readModel(model_path) == highspy.HighsStatus.kError:
        return ("Error", NAN, NAN, NAN, 0.0, [], None, "cannot read model")
    lp = h.getLp()
    names = list(lp.col_names_)
    integral = [i for i, kind in enumerate(lp.integrality_)
                if kind == highspy.HighsVarType.kInteger]

    start = time.perf_counter()
    h.run()
    wall = time.perf_counter() - start

    ms = h.getModelStatus()
    info = h.getInfo()
    has_sol = info.primal_solution_status == 2
    S = highspy.HighsModelStatus
    if ms == S.kOptimal:
        status = "Optimal"
    elif ms in (S.kInfeasible, S.kUnboundedOrInfeasible):
        status = "Infeasible"
    elif ms == S.kTimeLimit:
        status = "TimeLimit"
    elif has_sol:
        status = "Feasible"
    else:
        status = "Error"

    values = list(h.getSolution().col_value) if has_sol else None
    objective = info.objective_function_value if has_sol else NAN
    if integral:
        bound, gap = info.mip_dual_bound, info.mip_gap
    else:
        bound, gap = (objective, 0.0) if status == "Optimal" else (NAN, NAN)

    if values is not None and integral:
        values, objective = polish_highspy(h, integral, values, objective)
    if status == "Optimal" and not integral:
        bound = objective
    return (status, objective, bound, gap, wall, names, values,
            "" if status != "Error" else h.modelStatusToString(ms))


def polish_highspy(h, integral, values, objective):
    """Fix integers to their rounded values and re-solve the continuous part."""
    import highspy
    import numpy as np

    idx = np.array(integral, dtype=np.int32)
    rounded = np.array([round(values[i]) for i in integral], dtype=np.float64)
    h.changeColsIntegrality(len(idx), idx,
                            np.array([highspy.HighsVarType.kContinuous] * len(idx)))
    h.changeColsBounds(len(idx), idx, rounded, rounded)
    h.setOptionValue("output_flag", False)
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        return values, objective
    return list(h.getSolution().col_value), h.getInfo().objective_function_value


# ---------------------------------------------------------------- scipy


def have_scipy():
    try:
        from scipy.optimize import milp  # noqa: F401
        return True
    except ImportError:
        return False


def parse_free_mps(path):
    """Free-format MPS subset: ROWS, COLUMNS with integer markers, RHS, BOUNDS."""
    rows = {}        # name -> (index, sense)
    obj_row = None
    cols = {}        # name -> index
    names = []
    integral = []
    obj = []
    entries = []     # (row, col, value)
    rhs = []
    lower, upper = [], []
    bound_set = []
    section = None
    in_int = False
    with open(path) as f:
        for raw in f:
            line = raw.strip()
            if not line or line.startswith("*"):
                continue
            if not raw[0].isspace():
                head = line.split()
                section = head[0]
                if section == "ENDATA":
                    break
                continue
            tok = line.split()
            if section == "ROWS":
                sense, name = tok[0], tok[1]
                if sense == "N":
                    if obj_row is None:
                        obj_row = name
                    continue
                rows[name] = (len(rhs), sense)
                rhs.append(0.0)
            elif section == "COLUMNS":
                if len(tok) >= 3 and tok[1] == "'MARKER'":
                    in_int = tok[2] == "'INTORG'"
                    continue
                col = tok[0]
                if col not in cols:
                    cols[col] = len(names)
                    names.append(col)
                    integral.append(1 if in_int else 0)
                    obj.append(0.0)
                    lower.append(0.0)
                    upper.append(math.inf)
                    bound_set.append(False)
                c = cols[col]
                for r, v in zip(tok[1::2], tok[2::2]):
                    if r == obj_row:
                        obj[c] += float(v)
                    else:
                        entries.append((rows[r][0], c, float(v)))
            elif section == "RHS":
                pairs = tok[1:] if len(tok) % 2 == 1 else tok
                for r, v in zip(pairs[0::2], pairs[1::2]):
                    if r != obj_row:
                        rhs[rows[r][0]] = float(v)
            elif section == "BOUNDS":
                kind, col = tok[0], tok[2]
                c = cols[col]
                val = float(tok[3]) if len(tok) > 3 else 0.0
                bound_set[c] = True
                if kind == "UP":
                    upper[c] = val
                    if val < 0 and lower[c] == 0.0:
                        lower[c] = -math.inf
                elif kind == "LO":
                    lower[c] = val
                elif kind == "FX":
                    lower[c] = upper[c] = val
                elif kind == "FR":
                    lower[c], upper[c] = -math.inf, math.inf
                elif kind == "MI":
                    lower[c] = -math.inf
                elif kind == "PL":
                    upper[c] = math.inf
                elif kind == "BV":
                    lower[c], upper[c] = 0.0, 1.0
                    integral[c] = 1
                elif kind == "LI":
                    lower[c] = val
                    integral[c] = 1
                elif kind == "UI":
                    upper[c] = val
                    integral[c] = 1
                else:
                    raise ValueError(f"unsupported bound type {kind}")
            elif section in ("RANGES",):
                raise ValueError("RANGES section not supported")
    # MPS convention: integer columns without explicit bounds are binary.
    for c in range(len(names)):
        if integral[c] and not bound_set[c]:
            upper[c] = 1.0
    senses = [None] * len(rhs)
    for _name, (r, sense) in rows.items():
        senses[r] = sense
    return names, integral, obj, entries, senses, rhs, lower, upper


def solve_scipy(model_path, opts):
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, linprog, milp
    from scipy.sparse import csr_matrix

    names, integral, obj, entries, senses, rhs, lower, upper = parse_free_mps(model_path)
    n, m = len(names), len(rhs)
    if entries:
        r, c, v = zip(*entries)
    else:
        r, c, v = (), (), ()
    A = csr_matrix((v, (r, c)), shape=(m, n))
    lb = np.array([-np.inf if s == "L" else b for s, b in zip(senses, rhs)])
    ub = np.array([np.inf if s == "G" else b for s, b in zip(senses, rhs)])
    cons = [LinearConstraint(A, lb, ub)] if m else []
    integ = np.array(integral)
    start = time.perf_counter()
    res = milp(np.array(obj), constraints=cons, integrality=integ,
               bounds=Bounds(np.array(lower), np.array(upper)),
               options={"time_limit": float(opts.time_limit),
                        "mip_rel_gap": float(opts.gap), "disp": False})
    wall = time.perf_counter() - start
    has_sol = res.x is not None
    if res.status == 0:
        status = "Optimal"
    elif res.status == 2:
        status = "Infeasible"
    elif res.status == 1:
        status = "TimeLimit"
    elif has_sol:
        status = "Feasible"
    else:
        status = "Error"
    values = list(res.x) if has_sol else None
    objective = float(res.fun) if has_sol else NAN
    bound = getattr(res, "mip_dual_bound", None)
    gap = getattr(res, "mip_gap", None)
    if not integ.any():
        bound, gap = (objective, 0.0) if status == "Optimal" else (NAN, NAN)
    if values is not None and integ.any():
        lo, hi = np.array(lower), np.array(upper)
        x = np.array(values)
        mask = integ == 1
        lo[mask] = np.round(x[mask])
        hi[mask] = np.round(x[mask])
        A_ub_rows = [i for i, s in enumerate(senses) if s != "E"]
        A_eq_rows = [i for i, s in enumerate(senses) if s == "E"]
        sign = np.array([1.0 if senses[i] == "L" else -1.0 for i in A_ub_rows])
        A_ub = A[A_ub_rows].multiply(sign[:, None]).tocsr() if A_ub_rows else None
        b_ub = np.array([rhs[i] for i in A_ub_rows]) * sign if A_ub_rows else None
        A_eq = A[A_eq_rows] if A_eq_rows else None
        b_eq = np.array([rhs[i] for i in A_eq_rows]) if A_eq_rows else None
        lp = linprog(np.array(obj), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                     bounds=list(zip(lo, hi)), method="highs")
        if lp.status == 0:
            values, objective = list(lp.x), float(lp.fun)
    return (status, objective, NAN if bound is None else bound, NAN if gap is None else gap,
            wall, names, values, "" if status != "Error" else str(res.message))


# ---------------------------------------------------------------- driver


def main(argv):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--engine", default="auto", choices=["auto", "highspy", "scipy"])
    ap.add_argument("--jobs", required=True)
    ap.add_argument("--time-limit", type=float, default=3600.0)
    ap.add_argument("--gap", type=float, default=1e-6)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    try:
        opts = ap.parse_args(argv)
    except SystemExit:
        return 4

    engine = opts.engine
    if engine == "auto":
        engine = "highspy" if have_highspy() else "scipy" if have_scipy() else None
    elif engine == "highspy" and not have_highspy():
        engine = None
    elif engine == "scipy" and not have_scipy():
        engine = None
    if engine is None:
        print(f"milp_shim: engine '{opts.engine}' is not available", file=sys.stderr)
        return 3
    run = solve_highspy if engine == "highspy" else solve_scipy

    with open(opts.jobs) as f:
        jobs = [line.rstrip("\n").split("\t") for line in f if line.strip()]
    for model_path, solution_path in jobs:
        print(f"=== {model_path} ({engine})", flush=True)
        try:
            result = run(model_path, opts)
        except Exception as exc:  # reported per job, the batch continues
            result = ("Error", NAN, NAN, NAN, 0.0, [], None, f"{type(exc).__name__}: {exc}")
        write_solution(solution_path, engine, result[0], result[1], result[2], result[3],
                       result[4], result[5], result[6], result[7])
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
