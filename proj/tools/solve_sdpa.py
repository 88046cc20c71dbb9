#!/usr/bin/env python3
"""Solve an SDPA sparse (.dat-s) problem with cvxopt and write the result in
SDPA output conventions (objValPrimal, objValDual, xVec, xMat, yMat)."""

import argparse
import sys
from fractions import Fraction

from cvxopt import matrix, solvers, spmatrix


def tokens(line):
    for ch in "{}(),":
        line = line.replace(ch, " ")
    return line.split()


def read_dats(path):
    with open(path) as fh:
        lines = [l for l in fh if l.strip() and l.lstrip()[0] not in '"*']
    nvars = int(tokens(lines[0])[0])
    nblocks = int(tokens(lines[1])[0])
    sizes = [int(t) for t in tokens(lines[2])[:nblocks]]
    c = [float(Fraction(t)) for t in tokens(lines[3])[:nvars]]
    entries = []
    for l in lines[4:]:
        t = tokens(l)
        entries.append((int(t[0]), int(t[1]) - 1, int(t[2]) - 1, int(t[3]) - 1, float(Fraction(t[4]))))
    return nvars, sizes, c, entries


def solve(nvars, sizes, c, entries):
    # X_b = sum_i F_i x_i - F_0 is the cvxopt slack, so G = -F_i and h = -F_0.
    diag = [b for b, s in enumerate(sizes) if s < 0]
    dense = [b for b, s in enumerate(sizes) if s > 0]
    offset, total = {}, 0
    for b in diag:
        offset[b] = total
        total += -sizes[b]
    gl_i, gl_j, gl_v = [], [], []
    hl = [0.0] * total
    gs = {b: ([], [], []) for b in dense}
    hs = {b: matrix(0.0, (sizes[b], sizes[b])) for b in dense}
    for mat, b, i, j, v in entries:
        if sizes[b] < 0:
            if i != j:
                sys.exit("error: off-diagonal entry in a diagonal block")
            if mat == 0:
                hl[offset[b] + i] -= v
            else:
                gl_i.append(offset[b] + i)
                gl_j.append(mat - 1)
                gl_v.append(-v)
            continue
        n = sizes[b]
        cells = {(i, j), (j, i)}
        for r, s in cells:
            if mat == 0:
                hs[b][r, s] -= v
            else:
                gs[b][0].append(r + s * n)
                gs[b][1].append(mat - 1)
                gs[b][2].append(-v)
    # A pair of diagonal rows that negate each other is an equality; cvxopt
    # needs it written as one since the pair has no strictly feasible point.
    rows = {}
    for i, j, v in zip(gl_i, gl_j, gl_v):
        rows.setdefault(i, {})[j] = rows.get(i, {}).get(j, 0.0) + v
    sig = {k: (tuple(sorted(rows.get(k, {}).items())), hl[k]) for k in range(total)}
    pairs, used = [], set()
    for k in range(total):
        if k in used or not rows.get(k):
            continue
        neg = (tuple((j, -v) for j, v in sig[k][0]), -sig[k][1])
        for k2 in range(k + 1, total):
            if k2 not in used and sig[k2] == neg:
                pairs.append((k, k2))
                used.update((k, k2))
                break
    keep = [k for k in range(total) if k not in used]
    pos = {k: t for t, k in enumerate(keep)}
    li, lj, lv = [], [], []
    for i, j, v in zip(gl_i, gl_j, gl_v):
        if i in pos:
            li.append(pos[i])
            lj.append(j)
            lv.append(v)
    Gl = spmatrix(lv, li, lj, (len(keep), nvars))
    A = matrix(0.0, (len(pairs), nvars))
    b = matrix(0.0, (len(pairs), 1))
    for t, (k, _) in enumerate(pairs):
        for j, v in rows[k].items():
            A[t, j] = v
        b[t] = hl[k]
    Gs = [spmatrix(gs[b_][2], gs[b_][0], gs[b_][1], (sizes[b_] ** 2, nvars)) for b_ in dense]
    solvers.options.update({"show_progress": False, "abstol": 1e-11, "reltol": 1e-11, "feastol": 1e-11,
                            "maxiters": 200})
    extra = {"A": A, "b": b} if pairs else {}
    sol = solvers.sdp(matrix(c), Gl=Gl, hl=matrix([hl[k] for k in keep], (len(keep), 1), "d"),
                      Gs=Gs, hs=[hs[b_] for b_ in dense], **extra)
    if sol["status"] != "optimal":
        print("warn: solver status " + sol["status"], file=sys.stderr)
    sl = [0.0] * total
    zl = [0.0] * total
    for k in keep:
        sl[k] = sol["sl"][pos[k]]
        zl[k] = sol["zl"][pos[k]]
    for t, (k, k2) in enumerate(pairs):
        # dual of Gl_k x = h_k is y with z_k - z_k2 = y
        y = sol["y"][t]
        zl[k], zl[k2] = max(y, 0.0), max(-y, 0.0)
    x_blocks, y_blocks = [], []
    di = 0
    for b, s in enumerate(sizes):
        if s < 0:
            o = offset[b]
            x_blocks.append([sl[o + k] for k in range(-s)])
            y_blocks.append([zl[o + k] for k in range(-s)])
        else:
            X, Y = sol["ss"][di], sol["zs"][di]
            x_blocks.append([[X[r, t] for t in range(s)] for r in range(s)])
            y_blocks.append([[Y[r, t] for t in range(s)] for r in range(s)])
            di += 1
    return sol, x_blocks, y_blocks


def fmt(v):
    return "%.17g" % v


def write_block_list(out, blocks):
    out.write("{\n")
    for blk in blocks:
        if blk and isinstance(blk[0], list):
            out.write("{ " + ", ".join("{" + ",".join(fmt(v) for v in row) + "}" for row in blk) + " }\n")
        else:
            out.write("{" + ",".join(fmt(v) for v in blk) + "}\n")
    out.write("}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("input")
    ap.add_argument("output")
    args = ap.parse_args()
    nvars, sizes, c, entries = read_dats(args.input)
    sol, xb, yb = solve(nvars, sizes, c, entries)
    with open(args.output, "w") as out:
        out.write("objValPrimal = " + fmt(sol["primal objective"]) + "\n")
        out.write("objValDual   = " + fmt(sol["dual objective"]) + "\n")
        out.write("xVec = \n{" + ",".join(fmt(v) for v in sol["x"]) + "}\n")
        out.write("xMat = \n")
        write_block_list(out, xb)
        out.write("yMat = \n")
        write_block_list(out, yb)


if __name__ == "__main__":
    main()
