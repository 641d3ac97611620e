import itertools
import random

import pytest

from qcoideal.coideal import Coideal, NotMemberError
from qcoideal.qrat import ONE, QINV, ZERO, Q, QRat
from qcoideal.rootdata import eta_coroot, pairing_B, simple_roots_B


@pytest.fixture(scope="module")
def co3():
    return Coideal(3, ONE)


@pytest.fixture(scope="module")
def co3s():
    return Coideal(3, -ONE)  # specialisable at N = 3


def test_b1_leading_term_and_weight(co3):
    eng = co3.eng
    b1 = co3.b1()
    # filtration leading part is F_1
    lead = {m: c for m, c in b1.items() if sum(1 for x in m[0] if x == 1) == 1}
    assert eng.eq(lead, eng.F_el(1))
    # K_i conjugation: K_i B1 K_i^-1 = q^{-(alpha_i, alpha_1)} B1
    for i in (2, 3):
        got = eng.mul_many(eng.Ki_el(i), b1, eng.Ki_el(i, -1))
        assert eng.eq(got, eng.smul(QRat.q_power(-eng.A[i - 1][0]), b1))


def test_parameter_twist(co3):
    assert co3.parameter_twist_check(Q)
    assert co3.parameter_twist_check(-ONE)


def test_z1_value_and_symmetry(co3):
    eng = co3.eng
    z1 = co3.z1()
    c = ONE - QINV * QINV
    assert eng.eq(z1, eng.smul(c * c, eng.mul(eng.E_el(2), eng.E_el(3))))
    assert eng.eq(eng.sigma(z1), z1)


@pytest.mark.parametrize("c1", [ONE, -ONE, Q])
def test_defining_relations_n3(c1):
    co = Coideal(3, c1)
    for name, ok, _ in co.verify_relations():
        assert ok, name


def test_root_vector_examples(co3):
    eng = co3.eng
    assert eng.eq(co3.root_vector(1), co3.b1())
    assert eng.eq(co3.root_vector(2), eng.qcomm(eng.F_el(2), co3.b1(), Q))
    # conjugation weight of the lowest short root vector: q^{-gamma_{N-1}(h)}
    N = 3
    bN = co3.root_vector(N)
    gammas = simple_roots_B(N - 1)
    for j in range(N - 1):
        h = tuple(1 if t == j else 0 for t in range(N - 1))
        kvec = eta_coroot(h, N)
        got = eng.mul_many(eng.K_el(kvec), bN, eng.K_el(tuple(-v for v in kvec)))
        expo = -pairing_B(gammas[N - 2], h)
        assert eng.eq(got, eng.smul(QRat.q_power(expo), bN))


def test_straighten_examples(co3):
    eng = co3.eng
    assert co3.bc_straighten(co3.b1()) == {
        ((1, 0, 0, 0, 0, 0), (0, 0, 0), (0, 0, 0, 0, 0, 0)): ONE
    }
    got = co3.bc_straighten(eng.mul(eng.E_el(2), co3.b1()))
    assert got == {((1, 0, 0, 0, 0, 0), (0, 0, 0), (0, 0, 0, 0, 0, 1)): ONE}
    with pytest.raises(NotMemberError):
        co3.bc_straighten(eng.F_el(1))


def test_straighten_roundtrip_random(co3):
    rng = random.Random(12)
    eng = co3.eng
    keys = []
    for _ in range(8):
        J = [0] * 6
        for _ in range(rng.randint(0, 2)):
            J[rng.randrange(6)] += 1
        beta = (0, rng.randint(-1, 1), rng.randint(-1, 1))
        I = [0] * 6
        if rng.random() < 0.5:
            I[rng.choice([4, 5])] += 1
        keys.append((tuple(J), beta, tuple(I)))
    coords = {}
    for k in keys:
        coords[k] = coords.get(k, ZERO) + QRat.q_power(rng.randint(-2, 2))
    coords = {k: v for k, v in coords.items() if v}
    assert co3.bc_straighten(co3.expand(coords)) == coords


def test_filtration_leading_term_is_FJ(co3):
    eng = co3.eng
    for J in [(2, 0, 0, 0, 0, 0), (1, 1, 0, 0, 1, 0), (0, 1, 1, 0, 0, 0), (1, 0, 0, 1, 0, 0)]:
        d = co3.filtration_degree(J)
        bj = co3.expand_BJ(J)
        lead = {m: c for m, c in bj.items() if sum(1 for x in m[0] if x == 1) == d}
        assert eng.eq(lead, eng.expand_FJ(J))


def test_bcplus_not_closed_under_multiplication(co3):
    # [B_{beta_2}, B_{beta_1}]_{q^{-1}} straightens with a nonzero term at J = 0
    eng = co3.eng
    el = eng.qcomm(co3.root_vector(2), co3.root_vector(1), QINV)
    coords = co3.bc_straighten(el)
    j0 = {k: v for k, v in coords.items() if not any(k[0])}
    assert j0, "expected a nonzero filtration-zero component"


def test_omega_suite_n3_all_c1():
    for c1 in (ONE, -ONE, Q):
        co = Coideal(3, c1)
        for name, ok, _ in co.omega_suite():
            assert ok, (name, str(c1))


def test_omega_pi_examples(co3):
    eng = co3.eng
    om = co3.omega()
    half = (Q - QINV).inverse()
    mid = eng.sub(
        eng.mul(eng.Ki_el(3), eng.Ki_el(2, -1)), eng.mul(eng.Ki_el(2), eng.Ki_el(3, -1))
    )
    # N = 3: pi(Omega) = c_1 q (K_3 K_2^-1 - K_2 K_3^-1)/(q - q^-1)
    assert eng.eq(eng.pi0(om), eng.smul(co3.c1 * Q * half, mid))


def test_commutation_suite_n3(co3):
    for name, ok, _ in co3.commutation_suite():
        assert ok, name


def test_sigma_b(co3):
    eng = co3.eng
    # sigma^B fixes B_1 and the root vectors' straightened coordinates are involutive
    assert eng.eq(co3.root_vector_sigma(1), co3.b1())
    rng = random.Random(5)
    for _ in range(4):
        J = [0] * 6
        J[rng.randrange(6)] += 1
        J[rng.randrange(6)] += 1
        key = (tuple(J), (0, 0, 0), (0, 0, 0, 0, 0, 0))
        coords = {key: ONE}
        img = co3.sigmaB(coords)
        back = co3.sigmaB(img)
        assert back == coords


def test_sigma_b_on_mx_generators(co3):
    eng = co3.eng
    # on the node subalgebra sigma^B is sigma
    e2 = co3.bc_straighten(eng.E_el(2))
    assert co3.sigmaB(e2) == e2
    k2 = co3.bc_straighten(eng.Ki_el(2))
    k2inv = co3.bc_straighten(eng.Ki_el(2, -1))
    assert co3.sigmaB(k2) == k2inv


def test_coideal_membership(co3):
    eng = co3.eng
    ok, legs = co3.coideal_check(co3.b1())
    assert ok and len(legs) >= 2
    ok, legs = co3.coideal_check(eng.Ki_el(2))
    assert ok
    ok, legs = co3.coideal_check(eng.E_el(2))
    assert ok
    assert len(legs) == 2  # second legs of Delta(E_2) are 1 and E_2


def test_specialisable_condition():
    assert Coideal(3, -Q).specialisable()  # c1(1) = -1 = (-1)^3
    assert Coideal(3, -ONE).specialisable()
    assert not Coideal(3, ONE).specialisable()
    assert not Coideal(3, ONE / (Q - ONE)).specialisable()


def test_specialize_root_vectors_n3(co3s):
    for name, ok, _ in co3s.specialize_root_vectors():
        assert ok, name


def test_aform_regularity_spot_check(co3s):
    # products of PBW basis elements with regular coefficients straighten to
    # A-regular elements: per (J, I) block the Cartan part lies in the span of
    # monomials in K_i^{+-1} and (K_i - 1)/(q - 1).  (Coordinates over the
    # plain K_beta basis can carry poles; the commutator of the two short-root
    # vectors is the standard example.)
    rng = random.Random(31)
    basis = [
        ((1, 0, 0, 0, 0, 0), (0, 0, 0), (0, 0, 0, 0, 0, 0)),
        ((0, 1, 0, 0, 0, 0), (0, 0, 0), (0, 0, 0, 0, 0, 0)),
        ((0, 0, 1, 0, 0, 0), (0, 1, 0), (0, 0, 0, 0, 0, 0)),
        ((0, 0, 0, 1, 0, 0), (0, 0, 0), (0, 0, 0, 0, 1, 0)),
        ((0, 0, 0, 0, 1, 0), (0, 0, -1), (0, 0, 0, 0, 0, 0)),
        ((0, 0, 0, 0, 0, 1), (0, 0, 0), (0, 0, 0, 0, 0, 1)),
        ((1, 1, 0, 0, 0, 0), (0, 0, 0), (0, 0, 0, 0, 0, 0)),
    ]
    eng = co3s.eng
    for _ in range(20):
        a = rng.choice(basis)
        b = rng.choice(basis)
        prod = eng.mul(co3s.expand_monomial(*a), co3s.expand_monomial(*b))
        coords = co3s.bc_straighten(prod)
        blocks = {}
        for (J, beta, I), c in coords.items():
            blocks.setdefault((J, I), {})[beta] = c
        for (J, I), kcoords in blocks.items():
            assert co3s.cartan_aform_regular(kcoords), (a, b, J, I)


def test_cartan_aform_detects_poles(co3s):
    eng = co3s.eng
    half = (Q - QINV).inverse()
    # (K_2 K_3^-1 - K_3 K_2^-1)/(q - q^-1) is regular, 1/(q-1) * K_2 is not
    good = {(0, 1, -1): half, (0, -1, 1): -half}
    assert co3s.cartan_aform_regular(good)
    bad = {(0, 1, 0): (Q - ONE).inverse()}
    assert not co3s.cartan_aform_regular(bad)


def test_pbw_independence_small(co3):
    # expansions of distinct PBW indices of one weight are linearly independent
    from qcoideal.uq import _echelon_select

    eng = co3.eng
    by_weight = {}
    for J in itertools.product(range(3), repeat=6):
        if sum(J) > 2:
            continue
        w = co3.bweight_index(J, (0, 0, 0), (0,) * 6)
        by_weight.setdefault(w, []).append(J)
    checked = 0
    for w, js in by_weight.items():
        if len(js) < 2:
            continue
        rows = []
        colmap = {}
        for J in js:
            el = co3.expand_BJ(J)
            row = {}
            for m, c in el.items():
                row[colmap.setdefault(m, len(colmap))] = c
            rows.append(row)
        std, _ = _echelon_select(rows, None, len(rows))
        assert len(std) == len(js), w
        checked += 1
    assert checked >= 3
