"""Sparse exact rank over the integers, pure-Python kernel.

Gaussian elimination on dict rows with Markowitz-style pivoting; every
updated row is divided by its content gcd so entries stay small.  Input
rows must have integer entries (callers clear denominators first); rank
over Q equals rank over Z of the cleared matrix.
"""

from math import gcd


def rank_sparse(rows, ncols):
    """Rank of the sparse matrix given as an iterable of {col: int} rows."""
    rowmap = {}
    for i, r in enumerate(rows):
        live = {j: v for j, v in r.items() if v}
        if live:
            rowmap[i] = live
    cols = {}
    for i, r in rowmap.items():
        for j in r:
            cols.setdefault(j, set()).add(i)

    rank = 0
    while rowmap:
        # cheapest column, then the shortest row with the smallest pivot
        j = min(cols, key=lambda c: (len(cols[c]), c))
        i = min(cols[j], key=lambda r: (len(rowmap[r]), abs(rowmap[r][j]), r))
        piv = rowmap.pop(i)
        for jj in piv:
            cols[jj].discard(i)
        p = piv[j]
        rank += 1

        for r in list(cols.get(j, ())):
            row = rowmap[r]
            f = row[j]
            g = gcd(p, f)
            a = p // g
            b = f // g
            # row <- a*row - b*piv, which zeroes column j
            if a != 1:
                for jj in row:
                    row[jj] = a * row[jj]
            for jj, v in piv.items():
                nv = row.get(jj, 0) - b * v
                if nv:
                    if jj not in row:
                        cols.setdefault(jj, set()).add(r)
                    row[jj] = nv
                elif jj in row:
                    del row[jj]
                    cols[jj].discard(r)
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
                del rowmap[r]
        for c in [c for c in cols if not cols[c]]:
            del cols[c]
    return rank
