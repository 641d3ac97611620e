"""Verma modules for the coideal subalgebra, their contravariant form, simple
quotients and characters, submodule identities, the hidden quantum sl_2, and
branching to the node-2..N subalgebra with Gelfand-Tsetlin pattern counts.

A module vector is a dictionary over restricted PBW indices (the first
N-1 exponents vanish) tagged with its B-type weight.  The action of any
subalgebra element is: multiply against the expanded PBW monomial, straighten
back onto the PBW basis, then reduce modulo the defining left ideal of the
highest weight (raising parts act by zero, Cartan elements by powers of q
through the coroot embedding, positive root vectors by zero).

Weight-space dimensions of the simple quotient are computed as ranks of the
contravariant Gram matrices; the radical of that form is the maximal proper
submodule, so the rank at each weight equals the dimension of the simple
module there.  Every rank is exact; evaluations of the matrix at random
rational points serve only as a consistency pre-check.
"""

from __future__ import annotations

from fractions import Fraction

from .coideal import Coideal, NotMemberError
from .qrat import ONE, QINV, ZERO, Q, QRat, qfact, qint
from .rootdata import (
    branch_oracle,
    char_oracle_B,
    eta_inverse_coroot,
    gt_patterns,
    is_dominant_B,
    pairing_B,
    simple_roots_B,
    weyl_dim_B,
    weyl_dim_D,
)

_COIDEALS: dict = {}


def get_coideal(N: int, c1: QRat, bound: int) -> Coideal:
    """Shared coideal instances; slice tables dominate cost, so reuse them."""
    key = (N, c1)
    co = _COIDEALS.get(key)
    if co is None or co.eng.bound < bound:
        eng = None
        if co is not None:
            co.eng.bound = bound
            return co
        for (n2, _), other in _COIDEALS.items():
            if n2 == N:
                eng = other.eng
                eng.bound = max(eng.bound, bound)
                break
        co = Coideal(N, c1, bound=bound, engine=eng)
        _COIDEALS[key] = co
    return co


class VermaModule:
    """Highest-weight module with highest weight lam (doubled B coordinates)."""

    def __init__(self, lam: tuple[int, ...], N: int, c1: QRat, bound: int | None = None):
        if len(lam) != N - 1:
            raise ValueError("weight rank mismatch")
        self.N = N
        self.lam = tuple(lam)
        if bound is None:
            height = sum(abs(x) for x in lam) + 2 * N
            bound = max(2 * N + 4, 2 * height + 6)
        self.co = get_coideal(N, c1, bound)
        self.eng = self.co.eng
        nroots = self.eng.nroots
        self.restricted = list(range(N, nroots + 1))
        self._bwt = {a: self.co.bweight_index(_unit(nroots, a), (0,) * N, (0,) * nroots) for a in self.restricted}
        self._kpair = {i: pairing_B(self.lam, eta_inverse_coroot(i, N)) for i in range(2, N + 1)}
        self._basis_cache: dict = {}
        self._gram_cache: dict = {}
        self._rank_cache: dict = {}
        self._act_matrix_cache: dict = {}

    # -- basis ------------------------------------------------------------------

    def verma_basis(self, mu: tuple[int, ...]):
        """Restricted PBW indices of weight mu (doubled B coordinates)."""
        out = self._basis_cache.get(mu)
        if out is not None:
            return out
        target = tuple(m - l for m, l in zip(mu, self.lam))
        found = []
        roots = self.restricted
        nroots = self.eng.nroots

        def rec(rem, pos, acc):
            if all(v == 0 for v in rem):
                J = [0] * nroots
                for a, m in acc:
                    J[a - 1] = m
                found.append(tuple(J))
                return
            if pos == len(roots):
                return
            a = roots[pos]
            b = self._bwt[a]
            cur = rem
            m = 0
            while True:
                rec(cur, pos + 1, acc + [(a, m)])
                cur = tuple(x - y for x, y in zip(cur, b))
                m += 1
                if not _reachable(cur):
                    if all(v == 0 for v in cur):
                        rec(cur, pos + 1, acc + [(a, m)])
                    break

        def _reachable(rem):
            # all restricted root weights are <= 0 in the partial-sum order
            s = 0
            for x in rem:
                s += x
                if s > 0:
                    return False
            return True

        rec(target, 0, [])
        out = sorted(set(found))
        self._basis_cache[mu] = out
        return out

    # -- action ------------------------------------------------------------------

    def reduce(self, coords):
        """Reduce PBW coordinates modulo the defining left ideal."""
        N = self.N
        out = {}
        for (J, beta, I), c in coords.items():
            if any(I):
                continue
            if any(J[a] for a in range(N - 1)):
                continue
            if any(beta):
                e = sum(beta[i - 1] * self._kpair[i] for i in range(2, N + 1))
                c = c * QRat.q_power(e)
            w = out.get(J, ZERO) + c
            if w:
                out[J] = w
            else:
                out.pop(J, None)
        return out

    def act(self, name: str, vec):
        """Apply a named operator to a module vector {restricted index: coeff}."""
        out = {}
        for J, c in vec.items():
            for J2, c2 in self.reduce(self.co.straightened_left_mul(name, J)).items():
                w = out.get(J2, ZERO) + c * c2
                if w:
                    out[J2] = w
                else:
                    out.pop(J2, None)
        return out

    def act_word(self, names, vec):
        """Apply a product of named operators, rightmost factor first."""
        for name in reversed(names):
            vec = self.act(name, vec)
        return vec

    def highest_vector(self):
        return {(0,) * self.eng.nroots: ONE}

    def op_bweight(self, name: str) -> tuple[int, ...]:
        el = self.co.op_element(name)
        wts = {self.co.bweight_monomial(m) for m in el}
        assert len(wts) == 1, f"operator {name} is not weight homogeneous"
        return wts.pop()

    def act_matrix(self, name: str, mu: tuple[int, ...]):
        """Matrix of a named operator from the mu slice, with its target weight."""
        key = (name, mu)
        got = self._act_matrix_cache.get(key)
        if got is not None:
            return got
        basis = self.verma_basis(mu)
        target = tuple(a + b for a, b in zip(mu, self.op_bweight(name)))
        tbasis = {J: p for p, J in enumerate(self.verma_basis(target))}
        mat = []
        for J in basis:
            img = self.act(name, {J: ONE})
            mat.append({tbasis[J2]: c for J2, c in img.items()})
        got = (mat, target)
        self._act_matrix_cache[key] = got
        return got

    def act_element(self, el, vec):
        """Apply an arbitrary subalgebra element given in canonical form."""
        out = {}
        for J, c in vec.items():
            prod = self.eng.mul(el, self.co.expand_BJ(J))
            for J2, c2 in self.reduce(self.co.bc_straighten(prod)).items():
                w = out.get(J2, ZERO) + c * c2
                if w:
                    out[J2] = w
                else:
                    out.pop(J2, None)
        return out

    def _index_weight(self, J):
        w = list(self.lam)
        for a in self.restricted:
            if J[a - 1]:
                for t in range(self.N - 1):
                    w[t] += J[a - 1] * self._bwt[a][t]
        return tuple(w)

    # -- the contravariant form -----------------------------------------------------

    def gram(self, mu: tuple[int, ...]):
        """Gram matrix of the contravariant form on the mu weight slice."""
        got = self._gram_cache.get(mu)
        if got is not None:
            return got
        basis = self.verma_basis(mu)
        zero_index = (0,) * self.eng.nroots
        columns = []
        for J in basis:
            columns.append({J: ONE})
        rows = []
        for J in basis:
            word = []
            for a in range(1, self.eng.nroots + 1):  # sigma^B reverses the product
                word = [f"rvs{a}"] * J[a - 1] + word
            row = []
            for col in columns:
                vec = dict(col)
                for name in reversed(word):
                    vec = self.act(name, vec)
                row.append(vec.get(zero_index, ZERO))
            rows.append(row)
        n = len(basis)
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise RuntimeError(f"Gram matrix not symmetric at {mu}")
        self._gram_cache[mu] = rows
        return rows

    def gram_rank(self, mu: tuple[int, ...]) -> int:
        got = self._rank_cache.get(mu)
        if got is None:
            rows = self.gram(mu)
            got = exact_rank([{j: v for j, v in enumerate(r) if v} for r in rows])
            # randomized evaluation as a stability pre-check; exact result wins
            for q0 in (Fraction(9, 7), Fraction(13, 8)):
                num = _numeric_rank(rows, q0)
                if num != got:
                    got = exact_rank([{j: v for j, v in enumerate(r) if v} for r in rows])
                    break
            self._rank_cache[mu] = got
        return got

    # -- characters ------------------------------------------------------------------

    def simple_character(self, margin: int = 1):
        """Weight -> dim of the simple quotient, certified against the oracle."""
        if not is_dominant_B(self.lam):
            raise ValueError("weight must be dominant integral")
        oracle = char_oracle_B(self.lam)
        gammas = simple_roots_B(self.N - 1)
        for attempt in (margin, margin + 1):
            scan = set(oracle)
            ring = set()
            for w in oracle:
                frontier = {w}
                for _ in range(attempt):
                    nxt = set()
                    for v in frontier:
                        for g in gammas:
                            nxt.add(tuple(a - b for a, b in zip(v, g)))
                            nxt.add(tuple(a + b for a, b in zip(v, g)))
                    ring |= nxt
                    frontier = nxt
            ring -= set(oracle)
            dims = {}
            ok = True
            for mu in sorted(scan | ring):
                if not self.verma_basis(mu):
                    dims[mu] = 0
                    continue
                dims[mu] = self.gram_rank(mu)
            for mu in ring:
                if dims.get(mu, 0) != 0:
                    ok = False  # scan region too small: enlarge and retry once
            for mu, m in oracle.items():
                if dims.get(mu, 0) != m:
                    raise RuntimeError(
                        f"character mismatch at {mu}: rank {dims.get(mu, 0)}, oracle {m}"
                    )
            if ok:
                total = sum(d for w, d in dims.items() if w in oracle)
                assert total == weyl_dim_B(self.lam)
                return {w: d for w, d in dims.items() if d}
        raise RuntimeError("margin ring carried nonzero rank twice")

    # -- submodule identities -----------------------------------------------------------

    def submodule_suite(self, max_extra: int = 0):
        """The highest-weight generator and vanishing identities for the
        distinguished proper submodules, plus the nonvanishing remark."""
        N = self.N
        checks = []
        v0 = self.highest_vector()
        n = [pairing_B(self.lam, _unit(N - 1, j + 1)) for j in range(N - 1)]
        nN = n[N - 3] + n[N - 2]

        def add(name, ok):
            checks.append((name, ok))

        # (a) F_{i+1}^{n_i+1} v is singular for the subalgebra
        for i in range(1, N - 1):
            w = self.act_word([f"F{i + 1}"] * (n[i - 1] + 1), v0)
            for j in range(2, N + 1):
                add(f"E{j} F{i + 1}^{n[i - 1] + 1} v = 0", not self.act(f"E{j}", w))
            add(f"B_b{N - 1} F{i + 1}^{n[i - 1] + 1} v = 0", not self.act(f"rv{N - 1}", w))
        # (b) B_{beta_N}^{n_{N-1}+1} v is singular
        w = self.act_word([f"rv{N}"] * (n[N - 2] + 1), v0)
        for j in range(2, N + 1):
            add(f"E{j} B_bN^(n+1) v = 0", not self.act(f"E{j}", w))
        add(f"B_b{N - 1} B_bN^(n+1) v = 0", not self.act(f"rv{N - 1}", w))
        # (c) straightening of powers through the tail-node lowering operator
        for m in range(0, nN + 2):
            fm = self.act_word([f"F{N}"] * m, v0)
            for ell in range(0, m + 1):
                lhs = self.act_word([f"rv{N - 2}"] * ell, fm)
                scal = (-(QINV)) ** ell * qfact(m) / qfact(m - ell)
                rhs = self.act_word([f"F{N}"] * (m - ell), self.act_word([f"rv{N}"] * ell, v0))
                rhs = {k: scal * v for k, v in rhs.items()}
                add(f"B_b{N - 2}^{ell} F{N}^{m} v straightening", _vec_eq(lhs, rhs))
        # (d) the highest-weight component of the tail submodule vanishes
        w = self.act_word([f"F{N}"] * (nN + 1), v0)
        w = self.act_word([f"rv{N - 2}"] * (nN + 1), w)
        w = self.act_word([f"rv{N - 1}"] * (nN + 1), w)
        add("lambda component of tail submodule vanishes", not w)
        # (e) nonvanishing: B_{N-1} F_N^{m+1} v = -q^-1 [m+1] F_N^m B_{N+1} v != 0
        for m in range(0, nN + 1):
            lhs = self.act(f"rv{N - 1}", self.act_word([f"F{N}"] * (m + 1), v0))
            rhs = self.act_word([f"F{N}"] * m, self.act(f"rv{N + 1}", v0))
            rhs = {k: -(QINV) * qint(m + 1) * v for k, v in rhs.items()}
            add(f"B_b{N - 1} F{N}^{m + 1} v identity", _vec_eq(lhs, rhs) and bool(lhs))
        return checks

    # -- the hidden quantum sl_2 ----------------------------------------------------------

    def hv_window(self, depth: int = 2):
        """Basis vectors of H on a finite window of weights below lambda."""
        N = self.N
        gammas = simple_roots_B(N - 1)
        window = {self.lam}
        frontier = {self.lam}
        for _ in range(depth):
            nxt = set()
            for w in frontier:
                for g in gammas:
                    nxt.add(tuple(a - b for a, b in zip(w, g)))
            window |= nxt
            frontier = nxt
        out = {}
        for mu in sorted(window):
            basis = self.verma_basis(mu)
            if not basis:
                continue
            rows = []
            for name in [f"E{j}" for j in range(2, N + 1)] + [f"rv{N - 2}"]:
                mat, target = self.act_matrix(name, mu)
                tdim = len(self.verma_basis(target))
                for r in range(tdim):
                    row = {}
                    for cidx, col in enumerate(mat):
                        if r in col:
                            row[cidx] = col[r]
                    if row:
                        rows.append(row)
            kern = _kernel(rows, len(basis))
            if kern:
                out[mu] = [(basis, vec) for vec in kern]
        return out

    def sl2_suite(self, depth: int = 2):
        """The rescaled short-root vectors act as quantum sl_2 on the window."""
        N = self.N
        c1 = self.co.c1
        aprod = QRat.from_int((-1) ** (N - 1)) * c1.inverse() * QRat.q_power(2 - N)
        checks = []
        window = self.hv_window(depth)
        # the highest weight slice is one-dimensional, so a nonzero kernel
        # vector there is the highest weight vector up to a scalar
        checks.append(("highest vector lies in H", bool(window.get(self.lam))))
        half = (Q - QINV).inverse()
        for mu, items in window.items():
            kval = pairing_B(mu, _unit(N - 1, N - 1))
            scal = (QRat.q_power(kval) - QRat.q_power(-kval)) * half
            for basis, vec in items:
                v = {b: c for b, c in zip(basis, vec) if c}
                ef = self.act(f"rv{N - 1}", self.act(f"rv{N}", v))
                fe = self.act(f"rv{N}", self.act(f"rv{N - 1}", v))
                comm = _vec_sub(ef, fe)
                comm = {k: aprod * c for k, c in comm.items()}
                want = {k: scal * c for k, c in v.items()}
                checks.append((f"sl2 commutator on H at {mu}", _vec_eq(comm, want)))
                # H is invariant under both short-root vectors
                for name in (f"rv{N - 1}", f"rv{N}"):
                    img = self.act(name, v)
                    if not img:
                        continue
                    ok = all(not self.act(f"E{j}", img) for j in range(2, N + 1))
                    ok = ok and not self.act(f"rv{N - 2}", img)
                    checks.append((f"H invariant under {name} at {mu}", ok))
        return checks

    # -- branching and patterns -----------------------------------------------------------

    def branch_and_gt(self):
        """Highest weight vectors for the node subalgebra inside the simple
        quotient, matched against the classical branching oracle."""
        char = self.simple_character()
        N = self.N
        found = {}
        for mu in sorted(char):
            basis = self.verma_basis(mu)
            dmu = len(basis)
            rows = []
            for j in range(2, N + 1):
                mat, target = self.act_matrix(f"E{j}", mu)
                g_t = self.gram(target)
                tdim = len(g_t)
                # rows of G_target @ E_j
                for r in range(tdim):
                    row = {}
                    for cidx, col in enumerate(mat):
                        acc = ZERO
                        for rr, val in col.items():
                            acc = acc + g_t[r][rr] * val
                        if acc:
                            row[cidx] = acc
                    if row:
                        rows.append(row)
            sol_dim = dmu - exact_rank(rows)
            rad_dim = dmu - self.gram_rank(mu)
            hw = sol_dim - rad_dim
            if hw:
                found[mu] = hw
        # the subalgebra weight of a vector, in its own epsilon coordinates,
        # has the same doubled coordinates as the ambient B-type weight
        oracle = dict(branch_oracle(self.lam))
        ok = found == oracle
        patterns = gt_patterns(self.lam)
        dim_total = sum(char.values())
        return {
            "multiplicity_free": ok and all(m == 1 for m in found.values()),
            "branches": sorted((list(nu), m) for nu, m in found.items()),
            "oracle": sorted((list(nu), m) for nu, m in oracle.items()),
            "gt_count": len(patterns),
            "dim": dim_total,
            "gt_matches_dim": len(patterns) == dim_total,
        }

    # -- twists and duals ----------------------------------------------------------------------

    def twisted_element(self, el, chi: tuple[int, ...]):
        """(id (x) eps_chi) of the coproduct: the algebra map implementing the
        twist by a sign character of the coroot lattice.

        eps_chi kills raising and lowering parts, sends K_1 to 1 and K_{eta(h)}
        to chi(h); tensoring the module with the corresponding one-dimensional
        ambient module twists the action by this map.
        """
        N = self.N
        if len(chi) != N - 1 or any(s not in (1, -1) for s in chi):
            raise ValueError("chi must be a sign vector over the simple coroots")
        chi_i = {}
        for i in range(2, N + 1):
            h = eta_inverse_coroot(i, N)
            val = 1
            for s, m in zip(chi, h):
                val *= s**m
            chi_i[i] = val
        out = {}
        for (m1, m2), c in self.co.coproduct(el).items():
            f, k, e = m2
            if f or e:
                continue
            val = 1
            for i in range(2, N + 1):
                if k[i - 1] and chi_i[i] == -1 and k[i - 1] % 2:
                    val = -val
            cc = c if val == 1 else -c
            w = out.get(m1, ZERO) + cc
            if w:
                out[m1] = w
            else:
                out.pop(m1, None)
        return out

    def twist_suite(self, chi: tuple[int, ...], sample_weights=None):
        """Eigenvalue scaling of the twisted Cartan action plus the module
        relations for the twisted operators, on sampled vectors."""
        N, eng = self.N, self.eng
        checks = []
        tw = {}
        for i in range(2, N + 1):
            for nm in (f"E{i}", f"F{i}", f"K{i}"):
                tw[nm] = self.twisted_element(self.co.op_element(nm), chi)
        tw["B1"] = self.twisted_element(self.co.b1(), chi)
        if all(s == 1 for s in chi):
            for nm, el in tw.items():
                checks.append((f"trivial character fixes {nm}", eng.eq(el, self.co.op_element(nm))))
        # the twisted generator of the coideal determines a rescaled parameter
        lead = {m: c for m, c in tw["B1"].items() if sum(1 for x in m[0] if x == 1) == 1}
        checks.append(("twisted generator keeps leading term", eng.eq(lead, eng.F_el(1))))
        corr = eng.sub(eng.F_el(1), tw["B1"])
        base = eng.sub(eng.F_el(1), self.co.b1())
        ratio = None
        for m, c in base.items():
            if m in corr:
                r = corr[m] / c
                if ratio is None:
                    ratio = r
                elif ratio != r:
                    ratio = None
                    break
        checks.append(("twisted generator rescales the parameter", ratio is not None))
        if sample_weights is None:
            gammas = simple_roots_B(N - 1)
            sample_weights = [self.lam, tuple(a - b for a, b in zip(self.lam, gammas[0]))]
        samples = []
        for mu in sample_weights:
            for J in self.verma_basis(mu)[:2]:
                samples.append({J: ONE})
        for v in samples:
            b1v = self.act_element(tw["B1"], v)
            for i in range(2, N + 1):
                lhs = self.act_element(tw[f"E{i}"], b1v)
                rhs = self.act_element(tw["B1"], self.act_element(tw[f"E{i}"], v))
                checks.append((f"twisted E{i} B1 = B1 E{i} on sample", _vec_eq(lhs, rhs)))
            # twisted K eigenvalues are the old ones times the character value
            for i in range(2, N + 1):
                got = self.act_element(tw[f"K{i}"], v)
                plain = self.act(f"K{i}", v)
                sign = ONE if eng.eq(tw[f"K{i}"], eng.Ki_el(i)) else -ONE
                want = {k: sign * c for k, c in plain.items()}
                checks.append((f"twisted K{i} eigenvalue scaling", _vec_eq(got, want)))
        return checks

    def dual_suite(self):
        """Self-duality evidence: character symmetry and nondegeneracy of the
        induced form on every computed slice of the simple quotient."""
        char = self.simple_character()
        checks = []
        sym = all(char.get(tuple(-x for x in w), 0) == d for w, d in char.items())
        checks.append(("character symmetric under negation", sym))
        for mu in sorted(char):
            ok = self.gram_rank(mu) == char[mu]
            checks.append((f"induced form nondegenerate at {mu}", ok))
        return checks


def _unit(n, a):
    return tuple(1 if t == a - 1 else 0 for t in range(n))


def _vec_sub(a, b):
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, ZERO) - v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def _vec_eq(a, b):
    return not _vec_sub(a, b)


def exact_rank(rows) -> int:
    """Exact rank of sparse rows over the rational function field."""
    from .uq import _poly_size

    pivots = []
    rank = 0
    for row in rows:
        vec = {k: v for k, v in row.items() if v}
        for pc, prow in pivots:
            if pc in vec and vec[pc]:
                c = vec[pc] / prow[pc]
                for k, v in prow.items():
                    w = vec.get(k, ZERO) - c * v
                    if w:
                        vec[k] = w
                    else:
                        vec.pop(k, None)
        vec = {k: v for k, v in vec.items() if v}
        if vec:
            # pick the structurally simplest pivot entry
            pc = min(vec, key=lambda c: (_size_key(vec[c]), c))
            pivots.append((pc, vec))
            rank += 1
    return rank


def _size_key(v):
    return (len(v.num) + len(v.den), sum(1 for c in v.num if c))


def _kernel(rows, dim):
    """Exact kernel basis vectors (lists) of the stacked row constraints."""
    # gather as matrix columns indexed 0..dim-1
    mat = [dict() for _ in range(0)]
    reduced = []
    for row in rows:
        vec = dict(row)
        for pc, prow in reduced:
            if pc in vec and vec[pc]:
                c = vec[pc] / prow[pc]
                for k, v in prow.items():
                    w = vec.get(k, ZERO) - c * v
                    if w:
                        vec[k] = w
                    else:
                        vec.pop(k, None)
        vec = {k: v for k, v in vec.items() if v}
        if vec:
            reduced.append((min(vec), vec))
    pivot_cols = {pc for pc, _ in reduced}
    free_cols = [c for c in range(dim) if c not in pivot_cols]
    kernel = []
    for fc in free_cols:
        sol = {fc: ONE}
        # back-substitute in reverse pivot order
        for pc, prow in sorted(reduced, key=lambda t: -t[0]):
            acc = ZERO
            for k, v in prow.items():
                if k == pc:
                    continue
                if k in sol:
                    acc = acc + v * sol[k]
            if acc:
                sol[pc] = -(acc / prow[pc])
        kernel.append([sol.get(c, ZERO) for c in range(dim)])
    return kernel


def _numeric_rank(rows, q0: Fraction) -> int:
    mat = [[v.eval_fraction(q0) for v in r] for r in rows]
    rank = 0
    ncols = len(mat[0]) if mat else 0
    pivots = []
    for row in mat:
        row = row[:]
        for pc, prow in pivots:
            if row[pc]:
                c = row[pc] / prow[pc]
                for k in range(ncols):
                    row[k] -= c * prow[k]
        nz = [k for k in range(ncols) if row[k]]
        if nz:
            pivots.append((nz[0], row))
            rank += 1
    return rank
