"""Root and weight combinatorics for the D_N / B_{N-1} pair.

Weights are integer tuples of doubled epsilon-coordinates (true coordinate =
stored / 2), so spin weights stay integral.  All doubled coordinates of a
weight must share parity.  D_N data lives in N coordinates, B_{N-1} data in
N-1 coordinates.

The positive roots of D_N are enumerated from the fixed reduced word
sigma_1 ... sigma_{N-1} with sigma_i = s_i ... s_{N-2} s_{N-1} s_N s_{N-2} ... s_i,
which is also the order used for all PBW bases downstream.  The classical
character, dimension, Kostant-partition and branching oracles used to certify
the quantum computations live here as well.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


def _check_parity(w):
    if any((x - w[0]) % 2 for x in w):
        raise ValueError(f"doubled coordinates must share parity: {w}")


# ---------------------------------------------------------------------------
# simple roots, reflections, the reduced word for w_0
# ---------------------------------------------------------------------------


def simple_roots_D(N: int) -> list[tuple[int, ...]]:
    roots = []
    for i in range(1, N):
        v = [0] * N
        v[i - 1], v[i] = 2, -2
        roots.append(tuple(v))
    v = [0] * N
    v[N - 2] = v[N - 1] = 2
    roots.append(tuple(v))
    return roots


def simple_roots_B(M: int) -> list[tuple[int, ...]]:
    roots = []
    for i in range(1, M):
        v = [0] * M
        v[i - 1], v[i] = 2, -2
        roots.append(tuple(v))
    v = [0] * M
    v[M - 1] = 2
    roots.append(tuple(v))
    return roots


def reflect_D(i: int, w: tuple[int, ...], N: int) -> tuple[int, ...]:
    """Apply the simple reflection s_i of D_N in doubled epsilon-coordinates."""
    w = list(w)
    if i < N:
        w[i - 1], w[i] = w[i], w[i - 1]
    else:
        w[N - 2], w[N - 1] = -w[N - 1], -w[N - 2]
    return tuple(w)


def sigma_word(i: int, N: int) -> list[int]:
    if N == 2:
        return [1, 2]  # both sigma_1 and sigma_{N-1} degenerate to s_1 s_2
    if i == N - 1:
        return [N - 1, N]
    return list(range(i, N - 1)) + [N - 1, N] + list(range(N - 2, i - 1, -1))


@lru_cache(maxsize=None)
def w0_word(N: int) -> tuple[int, ...]:
    word: list[int] = []
    for i in range(1, N):
        word.extend(sigma_word(i, N))
    return tuple(word)


@lru_cache(maxsize=None)
def positive_roots(N: int) -> tuple[tuple[int, ...], ...]:
    """beta_j = s_{i_1} ... s_{i_{j-1}}(alpha_{i_j}) for the fixed reduced word."""
    if N < 2:
        raise ValueError("need N >= 2")
    word = w0_word(N)
    alphas = simple_roots_D(N)
    betas = []
    for j, ij in enumerate(word):
        b = alphas[ij - 1]
        for k in range(j - 1, -1, -1):
            b = reflect_D(word[k], b, N)
        betas.append(b)
    assert len(betas) == N * (N - 1)
    expected = set()
    for i in range(N):
        for j in range(i + 1, N):
            for s in (2, -2):
                v = [0] * N
                v[i], v[j] = 2, s
                expected.add(tuple(v))
    assert set(betas) == expected, "positive root enumeration mismatch"
    return tuple(betas)


def alpha1_coefficient(beta: tuple[int, ...]) -> int:
    """Coefficient of alpha_1 in a D_N root; equals the epsilon_1 coordinate."""
    return beta[0] // 2


# ---------------------------------------------------------------------------
# pairings and the coroot embedding
# ---------------------------------------------------------------------------


def pairing_D(w: tuple[int, ...], h: tuple[int, ...]) -> int:
    """lambda(h) for h an integer vector over the D_N simple coroots."""
    N = len(w)
    _check_parity(w)
    total = 0
    for i in range(1, N):
        total += h[i - 1] * (w[i - 1] - w[i])
    total += h[N - 1] * (w[N - 2] + w[N - 1])
    assert total % 2 == 0
    return total // 2


def pairing_B(w: tuple[int, ...], h: tuple[int, ...]) -> int:
    """lambda(h) for h an integer vector over the B_{N-1} simple coroots."""
    M = len(w)
    _check_parity(w)
    total = 0
    for i in range(1, M):
        total += h[i - 1] * (w[i - 1] - w[i])
    total += h[M - 1] * 2 * w[M - 1]
    assert total % 2 == 0
    return total // 2


def eta_coroot(h: tuple[int, ...], N: int) -> tuple[int, ...]:
    """Image of a B_{N-1} coroot vector under the coroot embedding into D_N."""
    out = [0] * N
    for i in range(1, N - 1):  # h_{gamma_i} -> h_{alpha_{i+1}}
        out[i] += h[i - 1]
    out[N - 2] -= h[N - 2]  # h_{gamma_{N-1}} -> h_{alpha_N} - h_{alpha_{N-1}}
    out[N - 1] += h[N - 2]
    return tuple(out)


def eta_inverse_coroot(i: int, N: int) -> tuple[int, ...]:
    """Preimage of h_{alpha_i} (i in 2..N) in the B_{N-1} coroot lattice."""
    if not 2 <= i <= N:
        raise ValueError("h_{alpha_1} is not in the image of the coroot embedding")
    h = [0] * (N - 1)
    if i <= N - 1:
        h[i - 2] = 1
    else:
        h[N - 3] = 1
        h[N - 2] = 1
    return tuple(h)


def bweight_of_dweight(w: tuple[int, ...]) -> tuple[int, ...]:
    """B_{N-1} weight seen by conjugation with K_{eta(h)}: drop epsilon_1."""
    return tuple(w[1:])


def theta_weight(w: tuple[int, ...]) -> tuple[int, ...]:
    """Involution induced on D_N weights: epsilon_1 -> -epsilon_1."""
    return (-w[0],) + tuple(w[1:])


# ---------------------------------------------------------------------------
# root coordinates and Kostant counting
# ---------------------------------------------------------------------------


def root_coords_D(w: tuple[int, ...], N: int):
    """Coordinates over the simple roots, or None if w is not in the root lattice.

    With w = sum_i c_i alpha_i the epsilon coordinates are
    e_k = c_k - c_{k-1} for k <= N-2 (c_0 = 0), e_{N-1} = c_{N-1} + c_N - c_{N-2}
    and e_N = c_N - c_{N-1}.
    """
    _check_parity(w)
    if w[0] % 2:
        return None
    e = [x // 2 for x in w]
    c = [0] * (N + 1)
    for k in range(1, N - 1):
        c[k] = e[k - 1] + c[k - 1]
    s = e[N - 2] + c[N - 2]  # = c_{N-1} + c_N
    d = e[N - 1]  # = c_N - c_{N-1}
    if (s - d) % 2:
        return None
    c[N - 1] = (s - d) // 2
    c[N] = (s + d) // 2
    return tuple(c[1:])


@lru_cache(maxsize=None)
def _betas_root_coords(N: int):
    return tuple(root_coords_D(b, N) for b in positive_roots(N))


@lru_cache(maxsize=None)
def kostant_count(mu: tuple[int, ...], N: int) -> int:
    """Number of ways to write mu as an N_0-combination of the positive roots."""
    if any(x % 2 for x in mu):
        return 0
    target = root_coords_D(mu, N)
    if target is None or any(x < 0 for x in target):
        return 0
    betas = _betas_root_coords(N)

    @lru_cache(maxsize=None)
    def count(rem, idx):
        if all(x == 0 for x in rem):
            return 1
        if idx == len(betas):
            return 0
        b = betas[idx]
        total = 0
        cur = rem
        while all(x >= 0 for x in cur):
            total += count(cur, idx + 1)
            cur = tuple(x - y for x, y in zip(cur, b))
        return total

    return count(target, 0)


# ---------------------------------------------------------------------------
# classical characters for B_M (Freudenthal) and dimensions
# ---------------------------------------------------------------------------


def _dot(a, b) -> Fraction:
    return Fraction(sum(x * y for x, y in zip(a, b)), 4)


def rho_B(M: int) -> tuple[int, ...]:
    return tuple(2 * M - 1 - 2 * i for i in range(M))


def rho_D(M: int) -> tuple[int, ...]:
    return tuple(2 * (M - 1 - i) for i in range(M))


def positive_roots_B(M: int) -> list[tuple[int, ...]]:
    roots = []
    for i in range(M):
        v = [0] * M
        v[i] = 2
        roots.append(tuple(v))
        for j in range(i + 1, M):
            for s in (2, -2):
                u = [0] * M
                u[i], u[j] = 2, s
                roots.append(tuple(u))
    return roots


def positive_roots_D_eps(M: int) -> list[tuple[int, ...]]:
    roots = []
    for i in range(M):
        for j in range(i + 1, M):
            for s in (2, -2):
                u = [0] * M
                u[i], u[j] = 2, s
                roots.append(tuple(u))
    return roots


def is_dominant_B(w: tuple[int, ...]) -> bool:
    return all(w[i] >= w[i + 1] for i in range(len(w) - 1)) and w[-1] >= 0


def is_dominant_D(w: tuple[int, ...]) -> bool:
    return all(w[i] >= w[i + 1] for i in range(len(w) - 1)) and w[-2] + w[-1] >= 0


def dominant_rep_B(w: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sorted((abs(x) for x in w), reverse=True))


def weyl_dim_B(lam: tuple[int, ...]) -> int:
    M = len(lam)
    if not is_dominant_B(lam):
        raise ValueError("weight is not dominant")
    _check_parity(lam)
    rho = rho_B(M)
    lr = tuple(a + b for a, b in zip(lam, rho))
    out = Fraction(1)
    for a in positive_roots_B(M):
        out *= _dot(lr, a) / _dot(rho, a)
    assert out.denominator == 1
    return int(out)


def weyl_dim_D(lam: tuple[int, ...]) -> int:
    M = len(lam)
    if M == 1:
        return 1  # so(2) torus: all weights one-dimensional
    if not is_dominant_D(lam):
        raise ValueError("weight is not dominant")
    rho = rho_D(M)
    lr = tuple(a + b for a, b in zip(lam, rho))
    out = Fraction(1)
    for a in positive_roots_D_eps(M):
        out *= _dot(lr, a) / _dot(rho, a)
    assert out.denominator == 1
    return int(out)


@lru_cache(maxsize=None)
def char_oracle_B(lam: tuple[int, ...]):
    """Full weight multiplicity table of the simple B_M module via Freudenthal.

    Returns a dict weight -> multiplicity covering the whole (generally
    non-dominant) support.  The total agrees with the Weyl dimension formula.
    """
    M = len(lam)
    if not is_dominant_B(lam):
        raise ValueError("weight is not dominant")
    _check_parity(lam)
    gammas = simple_roots_B(M)
    rho = rho_B(M)
    lr = tuple(a + b for a, b in zip(lam, rho))
    clam = _dot(lr, lr)
    pos = positive_roots_B(M)

    # dominant weights <= lam, found by walking down simple roots inside the
    # weight polytope (bounded below by the lowest weight -lam)
    neg_lam = tuple(-x for x in lam)
    dominants = set()
    frontier = [lam]
    seen = {lam}
    while frontier:
        nxt = []
        for w in frontier:
            if is_dominant_B(w):
                dominants.add(w)
            for g in gammas:
                v = tuple(a - b for a, b in zip(w, g))
                if v not in seen and _height_le(lam, v) and _height_le(v, neg_lam):
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt

    mult: dict[tuple[int, ...], int] = {}

    def get_mult(w):
        dom = dominant_rep_B(w)
        if not _height_le(lam, dom) or _parity_differs(lam, dom):
            return 0
        if dom in mult:
            return mult[dom]
        if dom == lam:
            mult[dom] = 1
            return 1
        if dom not in dominants:
            mult[dom] = 0
            return 0
        wr = tuple(a + b for a, b in zip(dom, rho))
        denom = clam - _dot(wr, wr)
        assert denom != 0
        total = Fraction(0)
        for a in pos:
            k = 1
            while True:
                u = tuple(x + k * y for x, y in zip(dom, a))
                mu = get_mult(u)
                if mu == 0 and not _height_le(lam, dominant_rep_B(u)):
                    break
                total += mu * _dot(u, a)
                k += 1
        m = 2 * total / denom
        assert m.denominator == 1
        mult[dom] = int(m)
        return mult[dom]

    for dom in sorted(dominants):
        get_mult(dom)

    table: dict[tuple[int, ...], int] = {}
    for dom, m in mult.items():
        if m == 0:
            continue
        for w in _signed_permutations(dom):
            table[w] = m
    assert sum(table.values()) == weyl_dim_B(lam)
    return table


def _parity_differs(a, b) -> bool:
    return (a[0] - b[0]) % 2 != 0


def _height_le(lam, w) -> bool:
    """w <= lam in the B-type root order (partial sums criterion)."""
    if _parity_differs(lam, w):
        return False
    s = 0
    for a, b in zip(lam, w):
        s += a - b
        if s < 0:
            return False
    return True


def _signed_permutations(w):
    from itertools import permutations, product

    support = set()
    for perm in set(permutations(w)):
        signs = [(x,) if x == 0 else (x, -x) for x in perm]
        for choice in product(*signs):
            support.add(choice)
    return support


# ---------------------------------------------------------------------------
# branching oracles and Gelfand-Tsetlin chains
# ---------------------------------------------------------------------------


def branch_oracle(lam: tuple[int, ...]):
    """so(2M+1) down to so(2M): multiplicity-free interlacing branching."""
    M = len(lam)
    if not is_dominant_B(lam):
        raise ValueError("weight is not dominant")
    _check_parity(lam)
    # nu_1 >= ... >= nu_{M-1} >= |nu_M| with lam_1 >= nu_1 >= lam_2 >= ... >= lam_M >= |nu_M|
    out = []

    def rec(prefix):
        i = len(prefix)
        if i == M:
            out.append((tuple(prefix), 1))
            return
        hi = lam[i]
        lo = lam[i + 1] if i + 1 < M else -lam[M - 1]
        v = hi
        while v >= lo:
            rec(prefix + [v])
            v -= 2
    rec([])
    total = sum(weyl_dim_D(nu) for nu, _ in out)
    assert total == weyl_dim_B(lam), "branching dimension mismatch"
    return out


def branch_D_to_B(nu: tuple[int, ...]):
    """so(2M) down to so(2M-1): nu_1 >= k_1 >= nu_2 >= ... >= k_{M-1} >= |nu_M|."""
    M = len(nu)
    if not is_dominant_D(nu):
        raise ValueError("weight is not dominant")
    out = []

    def rec(prefix):
        i = len(prefix)
        if i == M - 1:
            out.append((tuple(prefix), 1))
            return
        hi = nu[i]
        lo = abs(nu[M - 1]) if i == M - 2 else nu[i + 1]
        v = hi
        while v >= lo:
            rec(prefix + [v])
            v -= 2
    rec([])
    return out


def gt_patterns(lam: tuple[int, ...]):
    """All full interlacing chains down to so(2); their number is dim L(lam)."""
    M = len(lam)
    chains = [[lam]]
    for level in range(M, 0, -1):
        nxt = []
        for ch in chains:
            top = ch[-1]
            if len(top) == level:  # B_level -> D_level
                for nu, _ in branch_oracle(top):
                    nxt.append(ch + [nu])
        chains = nxt
        if level > 1:
            nxt = []
            for ch in chains:
                for kap, _ in branch_D_to_B(ch[-1]):
                    nxt.append(ch + [kap])
            chains = nxt
        else:
            break
    return [tuple(map(tuple, ch)) for ch in chains]
