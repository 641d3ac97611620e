import pytest

from qcoideal import rootdata as rd


def eps(N, *pairs):
    v = [0] * N
    for i, c in pairs:
        v[i - 1] = c
    return tuple(v)


def test_positive_roots_count_and_first():
    for N in (2, 3, 4, 5):
        betas = rd.positive_roots(N)
        assert len(betas) == N * (N - 1)
        assert betas[0] == rd.simple_roots_D(N)[0]  # beta_1 = alpha_1


def test_positive_roots_N3_order():
    # derived by applying the reflections of the fixed reduced word by hand
    expect = [
        eps(3, (1, 2), (2, -2)),
        eps(3, (1, 2), (3, -2)),
        eps(3, (1, 2), (3, 2)),
        eps(3, (1, 2), (2, 2)),
        eps(3, (2, 2), (3, 2)),
        eps(3, (2, 2), (3, -2)),
    ]
    assert list(rd.positive_roots(3)) == expect


def test_alpha1_occurs_exactly_in_first_2N_minus_2():
    for N in (3, 4, 5):
        betas = rd.positive_roots(N)
        for j, b in enumerate(betas, start=1):
            if j <= 2 * (N - 1):
                assert rd.alpha1_coefficient(b) != 0
            else:
                assert rd.alpha1_coefficient(b) == 0


def test_eta_inverse_coroot():
    N = 4
    assert rd.eta_inverse_coroot(2, N) == (1, 0, 0)
    assert rd.eta_inverse_coroot(3, N) == (0, 1, 0)
    assert rd.eta_inverse_coroot(N, N) == (0, 1, 1)
    with pytest.raises(ValueError):
        rd.eta_inverse_coroot(1, N)
    # eta then eta_inverse is the identity on h_{alpha_i}, i = 2..N
    for i in range(2, N + 1):
        h = rd.eta_coroot(rd.eta_inverse_coroot(i, N), N)
        unit = tuple(1 if j == i - 1 else 0 for j in range(N))
        assert h == unit


def test_pairing_short_root():
    # gamma_{N-1}(h_{gamma_{N-1}}) = 2
    for N in (3, 4):
        M = N - 1
        gamma = rd.simple_roots_B(M)[M - 1]
        h = tuple(1 if j == M - 1 else 0 for j in range(M))
        assert rd.pairing_B(gamma, h) == 2


def test_theta_on_weights():
    for N in (3, 4, 5):
        a1 = rd.simple_roots_D(N)[0]
        diff = tuple(x - y for x, y in zip(rd.theta_weight(tuple(-c for c in a1)), a1))
        coords = rd.root_coords_D(diff, N)
        # Theta(-alpha_1) - alpha_1 = 2(alpha_2 + ... + alpha_{N-2}) + alpha_{N-1} + alpha_N
        expect = [0] + [2] * (N - 3) + [1, 1]
        assert list(coords) == expect


def test_kostant_counts():
    z3 = (0, 0, 0)
    assert rd.kostant_count(z3, 3) == 1
    a = rd.simple_roots_D(3)
    assert rd.kostant_count(a[0], 3) == 1
    mu = tuple(x + y for x, y in zip(a[0], a[1]))
    assert rd.kostant_count(mu, 3) == 2  # {beta_2} and {beta_1 + beta_6}
    assert rd.kostant_count((1, 1, 0), 3) == 0  # odd doubled coords: not in Q


def test_weyl_dims_B2():
    assert rd.weyl_dim_B((2, 0)) == 5  # vector
    assert rd.weyl_dim_B((1, 1)) == 4  # spin
    assert rd.weyl_dim_B((3, 1)) == 16
    assert rd.weyl_dim_B((4, 0)) == 14
    assert rd.weyl_dim_B((0, 0)) == 1


def test_char_oracle_examples():
    assert rd.char_oracle_B((0, 0)) == {(0, 0): 1}
    table = rd.char_oracle_B((2, 0))
    assert sum(table.values()) == 5
    assert table[(0, 0)] == 1 and table[(2, 0)] == 1 and table[(-2, 0)] == 1
    spin = rd.char_oracle_B((1, 1))
    assert sum(spin.values()) == 4
    assert all(m == 1 for m in spin.values())


def test_char_oracle_symmetry_and_totals():
    for lam in [(2, 0), (1, 1), (3, 1), (4, 0), (2, 2), (4, 2)]:
        table = rd.char_oracle_B(lam)
        assert sum(table.values()) == rd.weyl_dim_B(lam)
        for w, m in table.items():
            assert table[tuple(-x for x in w)] == m  # w_0 = -1 in type B
    # a rank-3 case
    t3 = rd.char_oracle_B((2, 0, 0))
    assert sum(t3.values()) == rd.weyl_dim_B((2, 0, 0)) == 7


def test_branch_oracle_examples():
    assert rd.branch_oracle((0,)) == [((0,), 1)]
    br = dict(rd.branch_oracle((2, 0)))
    assert set(br) == {(2, 0), (0, 0)}  # vector -> vector + trivial
    assert rd.weyl_dim_D((2, 0)) == 4
    # dimension sums check against the D-type dimension formula for more weights
    for lam in [(1, 1), (3, 1), (4, 0), (2, 2)]:
        assert sum(rd.weyl_dim_D(nu) for nu, _ in rd.branch_oracle(lam)) == rd.weyl_dim_B(lam)


def test_gt_pattern_counts():
    assert len(rd.gt_patterns((1, 1))) == 4
    assert len(rd.gt_patterns((2, 0))) == 5
    assert len(rd.gt_patterns((3, 1))) == 16
    assert len(rd.gt_patterns((4, 0))) == 14
    assert len(rd.gt_patterns((2, 0, 0))) == 7


def test_bweight_drop():
    assert rd.bweight_of_dweight((2, -2, 0, 0)) == (-2, 0, 0)
