"""Exterior algebra of the dual Lie algebra with degree and weight gradings.

Monomials are strictly increasing tuples of dual-basis indices; the weight
of a monomial is the sum of the layers of its factors, and the coboundary
d0 connects only equal weights, so every rank computation is blocked by
(degree, weight).  The boundary delta is the metric adjoint of d0; with
the standard orthonormal inner product it is the plain transpose, and a
general layer-orthogonal inner product goes through exact Gram matrices.
"""

import itertools
from fractions import Fraction

from .errors import StructureError
from .linalg import ColumnEliminator, SparseMatrix


def sort_with_sign(indices):
    """Sorted tuple and permutation sign; None for a repeated index."""
    seq = list(indices)
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
            elif seq[j] == seq[j + 1]:
                return None, 0
    return tuple(seq), sign


def monomial_weight(algebra, mono):
    return sum(algebra.layer_of(i) for i in mono)


class FiberForm:
    """Exact element of the exterior algebra of the dual Lie algebra."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra, terms=None):
        self.algebra = algebra
        self.terms = {}
        if terms:
            for mono, c in terms.items():
                if c:
                    self.terms[tuple(mono)] = Fraction(c)

    @classmethod
    def monomial(cls, algebra, indices, coeff=1):
        mono, sign = sort_with_sign(indices)
        if mono is None:
            return cls(algebra)
        return cls(algebra, {mono: Fraction(coeff) * sign})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return self.algebra is other.algebra and self.terms == other.terms

    def __add__(self, other):
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono, Fraction(0)) + c
            if s:
                out[mono] = s
            elif mono in out:
                del out[mono]
        return FiberForm(self.algebra, out)

    def __sub__(self, other):
        return self + other.scaled(Fraction(-1))

    def scaled(self, a):
        a = Fraction(a)
        return FiberForm(self.algebra, {m: a * c for m, c in self.terms.items()})

    def wedge(self, other):
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono, sign = sort_with_sign(m1 + m2)
                if mono is None:
                    continue
                s = out.get(mono, Fraction(0)) + sign * c1 * c2
                if s:
                    out[mono] = s
                elif mono in out:
                    del out[mono]
        return FiberForm(self.algebra, out)

    def degrees(self):
        return sorted({len(m) for m in self.terms})

    def __repr__(self):
        return f"FiberForm({self.terms})"


class FilteredOperator:
    """Sparse exact map between monomial bases with filtration bookkeeping.

    mapping[src][dst] is the coefficient of dst in the image of src; every
    entry must shift degree by exactly `degree_shift` and weight by at
    least `min_weight_shift`.
    """

    def __init__(self, algebra, mapping, degree_shift, min_weight_shift):
        self.algebra = algebra
        self.mapping = mapping
        self.degree_shift = degree_shift
        self.min_weight_shift = min_weight_shift

    def apply(self, form):
        out = {}
        for mono, c in form.terms.items():
            for dst, v in self.mapping.get(mono, {}).items():
                s = out.get(dst, Fraction(0)) + c * v
                if s:
                    out[dst] = s
                elif dst in out:
                    del out[dst]
        return FiberForm(form.algebra, out)

    def check_filtration(self):
        """Exact per-entry check of the declared shifts; raises on failure."""
        alg = self.algebra
        for src, image in self.mapping.items():
            for dst in image:
                if len(dst) - len(src) != self.degree_shift:
                    raise StructureError(
                        f"degree shift violated on {src} -> {dst}"
                    )
                if monomial_weight(alg, dst) - monomial_weight(alg, src) < self.min_weight_shift:
                    raise StructureError(
                        f"weight shift violated on {src} -> {dst}"
                    )
        return True


class BggTable:
    """Bigraded ranks of ker delta / im delta, one row per nonempty block."""

    def __init__(self, algebra, rows):
        self.algebra = algebra
        self.rows = [(k, w, r) for (k, w, r) in rows]

    def by_degree(self):
        out = {}
        for k, w, r in self.rows:
            out.setdefault(k, []).append((w, r))
        return out

    def degree_total(self, k):
        return sum(r for kk, _, r in self.rows if kk == k)

    def weights(self):
        return sorted({w for _, w, _ in self.rows})

    def to_json(self):
        return [
            {"degree": k, "weight": w, "rank": r} for k, w, r in self.rows
        ]


class FiberContext:
    """Per-algebra cache of monomial bases, blocks, d0/delta and Hodge data."""

    def __init__(self, algebra, budget=None):
        self.algebra = algebra
        self.budget = budget
        self._mons = {}
        self._blocks = {}
        self._d0 = None
        self._delta = None
        self._pairs_by_target = None
        self._rank_cache = {}
        self._harmonic = {}
        self._imdelta_solver = {}
        self._kerdelta_solver = {}
        self._gram_inv = None

    # -- bases ------------------------------------------------------------

    def mons(self, k):
        if k < 0 or k > self.algebra.dim:
            return []
        if k not in self._mons:
            ms = list(itertools.combinations(range(self.algebra.dim), k))
            if self.budget is not None:
                self.budget.count_monomials(len(ms))
            self._mons[k] = ms
        return self._mons[k]

    def blocks(self, k):
        """Weight decomposition of degree k: {w: [monomials]} in lex order."""
        if k not in self._blocks:
            by_w = {}
            for m in self.mons(k):
                by_w.setdefault(monomial_weight(self.algebra, m), []).append(m)
            self._blocks[k] = dict(sorted(by_w.items()))
        return self._blocks[k]

    def block(self, k, w):
        return self.blocks(k).get(w, [])

    # -- structure maps ----------------------------------------------------

    def _target_pairs(self):
        """index k -> list of ((a, b), c) with a < b and c = c^k_{ab}."""
        if self._pairs_by_target is None:
            table = {}
            for (a, b), terms in self.algebra.bracket.items():
                if a < b:
                    for k, c in terms.items():
                        table.setdefault(k, []).append(((a, b), c))
            for k in table:
                table[k].sort()
            self._pairs_by_target = table
        return self._pairs_by_target

    def d0_of_monomial(self, mono):
        """Coboundary of one monomial as {monomial: coefficient}.

        d0 xi^k = -sum_{a<b} c^k_{ab} xi^a xi^b extended as an odd
        derivation; the minus sign makes d0^2 = 0 equivalent to Jacobi.
        """
        pairs = self._target_pairs()
        out = {}
        for pos, idx in enumerate(mono):
            hits = pairs.get(idx)
            if not hits:
                continue
            rest = mono[:pos] + mono[pos + 1 :]
            base = -((-1) ** pos)  # (-1)^pos from the derivation, -1 from d0
            for (a, b), c in hits:
                merged, sign = sort_with_sign((a, b) + rest)
                if merged is None:
                    continue
                s = out.get(merged, Fraction(0)) + base * sign * c
                if s:
                    out[merged] = s
                elif merged in out:
                    del out[merged]
        return out

    def d0_map(self):
        """Full {monomial: {monomial: coeff}} table over the exterior algebra."""
        if self._d0 is None:
            table = {}
            for k in range(self.algebra.dim + 1):
                for m in self.mons(k):
                    img = self.d0_of_monomial(m)
                    if img:
                        table[m] = img
            self._d0 = table
        return self._d0

    def delta_map(self):
        if self._delta is None:
            if self.algebra.inner_product_is_standard():
                table = {}
                for src, image in self.d0_map().items():
                    for dst, c in image.items():
                        table.setdefault(dst, {})[src] = c
                self._delta = table
            else:
                self._delta = self._delta_from_gram()
        return self._delta

    def _gram_inverse(self):
        """Inner product on the dual basis: inverse of the algebra's matrix."""
        if self._gram_inv is None:
            n = self.algebra.dim
            ident = SparseMatrix.identity(n)
            cols = {
                j: {i: self.algebra.inner_product[i][j] for i in range(n)}
                for j in range(n)
            }
            elim = ColumnEliminator(SparseMatrix(n, n, cols))
            inv = []
            for j in range(n):
                x = elim.solve(ident.column(j))
                if x is None:
                    raise StructureError("inner product is singular")
                inv.append([x.get(i, Fraction(0)) for i in range(n)])
            # column j of inverse solved above gives row-major transpose;
            # the matrix is symmetric so orientation does not matter
            self._gram_inv = inv
        return self._gram_inv

    def _gram_block(self, k, w):
        """Gram matrix of the (k, w) monomial block, entries det(G*[I,J])."""
        gstar = self._gram_inverse()
        monos = self.block(k, w)
        cols = {}
        for j, mj in enumerate(monos):
            col = {}
            for i, mi in enumerate(monos):
                val = _det([[gstar[a][b] for b in mj] for a in mi])
                if val:
                    col[i] = val
            cols[j] = col
        return SparseMatrix(len(monos), len(monos), cols)

    def _delta_from_gram(self):
        """delta = Gram_k^{-1} d0^T Gram_{k+1}, assembled blockwise."""
        table = {}
        for k in range(self.algebra.dim):
            for w, src_monos in self.blocks(k + 1).items():
                dst_monos = self.block(k, w)
                if not dst_monos:
                    continue
                d0b = self.d0_block(k, w)  # (k,w) -> (k+1,w)
                gram_hi = self._gram_block(k + 1, w)
                gram_lo_elim = ColumnEliminator(self._gram_block(k, w))
                dt = d0b.transpose()
                block = dt @ gram_hi
                for j, src in enumerate(src_monos):
                    col = block.column(j)
                    if not col:
                        continue
                    sol = gram_lo_elim.solve(col)
                    if sol is None:
                        raise StructureError("Gram solve failed; inner product degenerate")
                    image = {dst_monos[i]: v for i, v in sol.items() if v}
                    if image:
                        table[src] = {**table.get(src, {}), **image}
        return table

    def delta_of_monomial(self, mono):
        return dict(self.delta_map().get(mono, {}))

    # -- positional blocks and ranks ----------------------------------------

    def d0_block(self, k, w):
        """Matrix of d0 from block (k, w) to block (k+1, w)."""
        src = self.block(k, w)
        dst = self.block(k + 1, w)
        index = {m: i for i, m in enumerate(dst)}
        cols = {}
        for j, m in enumerate(src):
            col = {}
            for out, c in self.d0_of_monomial(m).items():
                pos = index.get(out)
                if pos is None:
                    raise StructureError(f"d0 left weight block at {m} -> {out}")
                col[pos] = c
            if col:
                cols[j] = col
        return SparseMatrix(len(dst), len(src), cols)

    def delta_block(self, k, w):
        """Matrix of delta from block (k, w) to block (k-1, w)."""
        src = self.block(k, w)
        dst = self.block(k - 1, w)
        index = {m: i for i, m in enumerate(dst)}
        cols = {}
        for j, m in enumerate(src):
            col = {}
            for out, c in self.delta_of_monomial(m).items():
                col[index[out]] = c
            if col:
                cols[j] = col
        return SparseMatrix(len(dst), len(src), cols)

    def rank_d0_block(self, k, w):
        key = (k, w)
        if key not in self._rank_cache:
            if self.budget is not None:
                self.budget.check()
            self._rank_cache[key] = self.d0_block(k, w).rank()
        return self._rank_cache[key]

    def rank_d0_degree(self, k):
        return sum(self.rank_d0_block(k, w) for w in self.blocks(k))

    # -- Hodge data per block ------------------------------------------------

    def harmonic_basis(self, k, w):
        """Canonical basis of ker d0 ∩ ker delta in block (k, w)."""
        key = (k, w)
        if key not in self._harmonic:
            monos = self.block(k, w)
            stacked = self.d0_block(k, w).stack(self.delta_block(k, w))
            basis = ColumnEliminator(stacked).nullspace()
            self._harmonic[key] = [
                {monos[i]: v for i, v in vec.items()} for vec in basis
            ]
        return self._harmonic[key]

    def laplacian_block(self, k, w):
        d_lo = self.d0_block(k - 1, w)
        delta_k = self.delta_block(k, w)
        d_k = self.d0_block(k, w)
        delta_hi = self.delta_block(k + 1, w)
        return d_lo @ delta_k + delta_hi @ d_k

    def imdelta_solver(self, k, w):
        """Eliminator of L0 @ delta-block; solves L0 u = v inside im delta."""
        key = (k, w)
        if key not in self._imdelta_solver:
            lap = self.laplacian_block(k, w)
            dblock = self.delta_block(k + 1, w)
            self._imdelta_solver[key] = (ColumnEliminator(lap @ dblock), dblock)
        return self._imdelta_solver[key]

    def kerdelta_solver(self, k, w):
        """Eliminator of [harmonic basis | delta-block] for projections."""
        key = (k, w)
        if key not in self._kerdelta_solver:
            monos = self.block(k, w)
            index = {m: i for i, m in enumerate(monos)}
            harm = self.harmonic_basis(k, w)
            dblock = self.delta_block(k + 1, w)
            cols = {}
            for j, vec in enumerate(harm):
                cols[j] = {index[m]: v for m, v in vec.items()}
            for j, col in dblock.cols.items():
                cols[len(harm) + j] = dict(col)
            matrix = SparseMatrix(len(monos), len(harm) + dblock.ncols, cols)
            self._kerdelta_solver[key] = (ColumnEliminator(matrix), len(harm))
        return self._kerdelta_solver[key]


def _det(rows):
    """Dense exact determinant by fraction Gaussian elimination."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    m = [list(r) for r in rows]
    det = Fraction(1)
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return det


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def d0(algebra, context=None):
    """Chevalley-Eilenberg coboundary as a FilteredOperator (degree +1)."""
    ctx = context or FiberContext(algebra)
    return FilteredOperator(algebra, ctx.d0_map(), degree_shift=1, min_weight_shift=0)


def delta(algebra, context=None):
    """Metric adjoint of d0 as a FilteredOperator (degree -1)."""
    ctx = context or FiberContext(algebra)
    return FilteredOperator(algebra, ctx.delta_map(), degree_shift=-1, min_weight_shift=0)


def cohomology_ranks(algebra, budget=None, context=None):
    """Betti numbers b_k = dim - rank(d0|k) - rank(d0|k-1), exact."""
    ctx = context or FiberContext(algebra, budget)
    dim = algebra.dim
    ranks = [ctx.rank_d0_degree(k) for k in range(dim + 1)]
    betti = []
    for k in range(dim + 1):
        b = len(ctx.mons(k)) - ranks[k] - (ranks[k - 1] if k > 0 else 0)
        betti.append(b)
    return betti


def bgg_fiber(algebra, budget=None, context=None):
    """Bigraded ranks of ker delta / im delta per (degree, weight) block."""
    ctx = context or FiberContext(algebra, budget)
    rows = []
    for k in range(algebra.dim + 1):
        for w, monos in ctx.blocks(k).items():
            r = len(monos) - ctx.rank_d0_block(k, w)
            if k > 0 and ctx.block(k - 1, w):
                r -= ctx.rank_d0_block(k - 1, w)
            if r:
                rows.append((k, w, r))
    return BggTable(algebra, rows)


def fiber_inner(context, alpha, beta):
    """Inner product of fiber forms under the algebra's inner product."""
    alg = context.algebra
    if alg.inner_product_is_standard():
        total = Fraction(0)
        for mono, c in alpha.terms.items():
            total += c * beta.terms.get(mono, Fraction(0))
        return total
    total = Fraction(0)
    by_block = {}
    for mono, c in alpha.terms.items():
        key = (len(mono), monomial_weight(alg, mono))
        by_block.setdefault(key, {})[mono] = c
    for (k, w), aterms in by_block.items():
        monos = context.block(k, w)
        index = {m: i for i, m in enumerate(monos)}
        gram = context._gram_block(k, w)
        avec = {index[m]: c for m, c in aterms.items()}
        gv = gram.apply(avec)
        for mono, c in beta.terms.items():
            if len(mono) == k and monomial_weight(alg, mono) == w:
                total += c * gv.get(index[mono], Fraction(0))
    return total
