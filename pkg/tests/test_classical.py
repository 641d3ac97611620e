import random

import pytest

from qcoideal.classical import (
    E,
    Mat,
    b_vec,
    bracket,
    chevalley,
    d_vec,
    eta,
    phi_embed,
    run_suite,
    so_basis,
    theta,
    verify_classical,
)


@pytest.mark.parametrize("n", [6, 7, 8, 9, 10])
def test_chevalley_triples_lie_in_so_and_satisfy_sl2(n):
    rank = n // 2
    for i in range(1, rank + 1):
        t = chevalley(n, i)
        for m in (t.e, t.f, t.h):
            assert m.in_so()
        assert bracket(t.h, t.e) == 2 * t.e
        assert bracket(t.h, t.f) == -2 * t.f
        assert bracket(t.e, t.f) == t.h


def test_chevalley_printed_forms():
    N = 4
    t = chevalley(2 * N, N)
    assert t.e == E(2 * N, N - 1, N + 1) - E(2 * N, N, N + 2)
    todd = chevalley(2 * N + 1, N)
    assert todd.f == 2 * (E(2 * N + 1, N + 1, N) - E(2 * N + 1, N + 2, N + 1))


def test_out_of_range_root_index():
    with pytest.raises(ValueError):
        chevalley(8, 5)


@pytest.mark.parametrize("N", [3, 4])
def test_theta_examples(N):
    n = 2 * N
    e1 = chevalley(n, 1).e
    assert theta(e1, N) == -E(n, n - 1, 1) + E(n, n, 2)
    for j in range(2, N + 1):
        t = chevalley(n, j)
        assert theta(t.e, N) == t.e
    for m in so_basis(n):
        assert theta(theta(m, N), N) == m


@pytest.mark.parametrize("N", [3, 4])
def test_eta_is_homomorphism_on_random_pairs(N):
    rng = random.Random(11)
    basis = so_basis(2 * N - 1)
    for _ in range(25):
        x, y = rng.choice(basis), rng.choice(basis)
        assert eta(bracket(x, y), N) == bracket(eta(x, N), eta(y, N))
    # image lies in the fixed space
    for x in basis:
        im = eta(x, N)
        assert theta(im, N) == im


def test_eta_on_generators():
    N = 4
    for i in range(1, N - 1):
        g = chevalley(2 * N - 1, i)
        a = chevalley(2 * N, i + 1)
        assert eta(g.e, N) == a.e and eta(g.f, N) == a.f and eta(g.h, N) == a.h
    gN1 = chevalley(2 * N - 1, N - 1)
    aN1, aN = chevalley(2 * N, N - 1), chevalley(2 * N, N)
    assert eta(gN1.h, N) == aN.h - aN1.h


def test_phi_embedding_preserves_brackets():
    N = 3
    rng = random.Random(3)
    basis = so_basis(2 * N)
    for _ in range(20):
        x, y = rng.choice(basis), rng.choice(basis)
        assert phi_embed(bracket(x, y)) == bracket(phi_embed(x), phi_embed(y))
        assert phi_embed(x).in_so()


@pytest.mark.parametrize("N", [3, 4, 5])
def test_identity_suite(N):
    for row in run_suite(N):
        assert row["pass"], f"identity {row['name']} failed at N={N}"


def test_single_identities_from_examples():
    ok, _ = verify_classical("2Nin2N1", 3)
    assert ok
    ok, _ = verify_classical("f1tf1", 4)
    assert ok
    ok, _ = verify_classical("ms2", 3)
    assert ok


def test_b_d_are_so_elements():
    N = 3
    for i in range(1, N + 1):
        assert b_vec(N, i).in_so()
        assert d_vec(N, i).in_so()
