# cython: language_level=3, boundscheck=False, wraparound=False
"""Sparse exact rank over the integers, compiled kernel.

Same algorithm as ffelim_py (gcd-normalized elimination with Markowitz
pivoting); arithmetic stays on arbitrary-precision Python ints, the win
is loop and container overhead on the big weight blocks.
"""

from math import gcd


def rank_sparse(rows, ncols):
    """Rank of the sparse matrix given as an iterable of {col: int} rows."""
    cdef dict rowmap = {}
    cdef dict cols = {}
    cdef dict row, piv, live
    cdef set colset
    cdef Py_ssize_t i, rank
    cdef long long best_len, cur_len

    i = 0
    for r in rows:
        live = {}
        for j, v in (<dict> r).items():
            if v:
                live[j] = v
        if live:
            rowmap[i] = live
        i += 1
    for ri, row in rowmap.items():
        for j in row:
            colset = <set> cols.get(j)
            if colset is None:
                colset = set()
                cols[j] = colset
            colset.add(ri)

    rank = 0
    while rowmap:
        jbest = None
        best_len = -1
        for j, colset in cols.items():
            cur_len = len(<set> colset)
            if best_len < 0 or cur_len < best_len or (cur_len == best_len and j < jbest):
                jbest = j
                best_len = cur_len
        j = jbest

        ibest = None
        bkey = None
        for ri in <set> cols[j]:
            row = <dict> rowmap[ri]
            key = (len(row), abs(row[j]), ri)
            if bkey is None or key < bkey:
                bkey = key
                ibest = ri
        piv = <dict> rowmap.pop(ibest)
        for jj in piv:
            (<set> cols[jj]).discard(ibest)
        p = piv[j]
        rank += 1

        for ri in list(<set> cols.get(j, ())):
            row = <dict> rowmap[ri]
            f = row[j]
            g = gcd(p, f)
            a = p // g
            b = f // g
            if a != 1:
                for jj in row:
                    row[jj] = a * row[jj]
            for jj, v in piv.items():
                nv = row.get(jj, 0) - b * v
                if nv:
                    if jj not in row:
                        colset = <set> cols.get(jj)
                        if colset is None:
                            colset = set()
                            cols[jj] = colset
                        colset.add(ri)
                    row[jj] = nv
                elif jj in row:
                    del row[jj]
                    (<set> cols[jj]).discard(ri)
            if row:
                g = 0
                for v in row.values():
                    g = gcd(g, v)
                    if g == 1:
                        break
                if g > 1:
                    for jj in row:
                        row[jj] //= g
            else:
                del rowmap[ri]
        empties = [c for c, colset in cols.items() if not (<set> colset)]
        for c in empties:
            del cols[c]
    return rank
