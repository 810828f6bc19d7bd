import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sixvertex.algebra import (
    casimir,
    irrep,
    l_inversion_residual,
    l_operator,
    l_product_scalar,
    r_matrix,
    rbar_matrix,
    rll_residual,
    weight_yang_baxter_residual,
    yang_baxter_residual,
)
from sixvertex.weights import Regime, RegimeParams, VertexWeights, weights_from_regime

Q_GRID = (0.5, 1.3, cmath.exp(0.4j))


def test_r_matrix_layout():
    R = r_matrix(1.7, 0.8)
    z, q = 1.7, 0.8
    den = z * q - 1 / (z * q)
    assert R[0, 0] == R[3, 3] == 1.0
    assert R[1, 1] == R[2, 2] == pytest.approx((z - 1 / z) / den)
    assert R[1, 2] == pytest.approx((q - 1 / q) / den / z)
    assert R[2, 1] == pytest.approx((q - 1 / q) / den * z)
    assert R[0, 1] == R[1, 0] == 0.0


def test_r_matrix_is_permutation_at_unit_argument():
    P = np.zeros((4, 4))
    P[0, 0] = P[3, 3] = P[1, 2] = P[2, 1] = 1.0
    for q in Q_GRID:
        assert np.allclose(r_matrix(1.0, q), P, atol=1e-14)


def test_r_matrix_pole_raises():
    # the normalization denominator zq - 1/(zq) vanishes at z = 1/q
    with pytest.raises(ZeroDivisionError):
        r_matrix(1.0 / 1.3, 1.3)


def test_charge_commutator_vanishes_exactly():
    sz = np.diag([1.0, -1.0])
    charge = np.kron(sz, np.eye(2)) + np.kron(np.eye(2), sz)
    for q in Q_GRID:
        R = r_matrix(1.7 - 0.4j, q)
        assert np.all(charge @ R - R @ charge == 0)


def test_yang_baxter_100_random_pairs():
    rng = np.random.default_rng(42)
    worst = 0.0
    for q in Q_GRID:
        for _ in range(100):
            z = rng.uniform(0.3, 3.0) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            w = rng.uniform(0.3, 3.0) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            worst = max(worst, yang_baxter_residual(z, w, q))
    assert worst < 1e-12


# same-anisotropy weight triples, one per regime: the triple at spectral
# parameters (lam - mu, lam, mu) closes the weight-form equation
WEIGHT_TRIPLES = [
    (Regime.FERRO_A, 1.4, 0.5, 0.9),
    (Regime.ANTIFERRO, 0.9, 0.5, 1.2),
    (Regime.DISORDERED_POS, 0.8, 0.45, 1.1),
    (Regime.DISORDERED_NEG, 0.7, 0.4, 2.0),
]


@pytest.mark.parametrize("tag,lam,mu,eg", WEIGHT_TRIPLES)
def test_weight_yang_baxter_per_regime(tag, lam, mu, eg):
    def w(spectral):
        return VertexWeights.symmetric(
            *weights_from_regime(RegimeParams(tag, spectral, eg, 1.0)))

    resid = weight_yang_baxter_residual(w(lam - mu), w(lam), w(mu))
    assert resid < 1e-12


def test_weight_yang_baxter_ferro_b():
    # on the a < b branch the closing same-anisotropy triple mixes the two
    # branches: (b-branch at lam+mu, b-branch at lam, a-branch at mu).  This
    # is the image of the a-branch identity under lam -> -lam - eta, with the
    # sign flips cancelling pairwise.
    lam, mu, eg = 1.4, 0.5, 0.9

    def w(tag, s):
        return VertexWeights.symmetric(
            *weights_from_regime(RegimeParams(tag, s, eg, 1.0)))

    resid = weight_yang_baxter_residual(w(Regime.FERRO_B, lam + mu),
                                        w(Regime.FERRO_B, lam),
                                        w(Regime.FERRO_A, mu))
    assert resid < 1e-12


def test_weight_yang_baxter_detects_mismatch():
    w1 = VertexWeights.symmetric(1.0, 0.5, 0.7)
    resid = weight_yang_baxter_residual(w1, w1, w1)
    assert resid > 1e-3  # equal arguments do not solve the equation


def test_rbar_matrix_layout():
    w = VertexWeights(1, 2, 3, 4, 5, 6)
    R = np.asarray(rbar_matrix(w), dtype=float)
    # R[(1-oe)*2+(1-os), (1-ow)*2+(1-on)]
    assert R[0, 0] == 1  # a1: all occupied
    assert R[3, 3] == 2  # a2
    assert R[1, 1] == 3  # b1 = (1,0,1,0)
    assert R[2, 2] == 4  # b2
    assert R[3 - 1, 1] == R[2, 1]  # layout smoke: c entries off-diagonal
    assert R[2, 1] == 5  # c1 = (1,0,0,1): row (1-0)*2+(1-1), col (1-1)*2+(1-0)
    assert R[1, 2] == 6  # c2


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
@pytest.mark.parametrize("q", [1.7, 0.6, cmath.exp(0.3j)])
def test_casimir_is_scalar(m, q):
    k, e, f = irrep(m, q)
    C = f @ e + np.linalg.matrix_power(k, 2) * q + np.linalg.matrix_power(
        np.linalg.inv(k), 2) / q
    lam = q ** (m + 1) + q ** (-(m + 1))
    assert np.allclose(C, lam * np.eye(m + 1), atol=1e-12 * max(abs(lam), 1))
    assert np.allclose(casimir(m, q), lam * np.eye(m + 1),
                       atol=1e-12 * max(abs(lam), 1))


def test_irrep_weight_ladder():
    m, q = 3, 1.4
    k, e, f = irrep(m, q)
    assert np.allclose(np.diag(k), [q ** (m / 2 - n) for n in range(m + 1)])
    # e raises (toward index 0) and f lowers, one step each
    assert np.allclose(np.triu(e, 2), 0) and np.allclose(np.tril(e), 0)
    assert np.allclose(np.tril(f, -2), 0) and np.allclose(np.triu(f), 0)


def test_irrep_m1_explicit():
    q = 1.9
    k, e, f = irrep(1, q)
    assert np.allclose(np.diag(k), [q ** 0.5, q ** -0.5])
    assert f[1, 0] == pytest.approx(q - 1 / q)
    assert e[0, 1] == pytest.approx(q - 1 / q)
    assert casimir(0, q) == pytest.approx(q + 1 / q)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("q", [1.3, 0.7, cmath.exp(0.25j)])
def test_rll_exchange(m, q):
    rng = np.random.default_rng(5)
    for _ in range(4):
        z = rng.uniform(0.4, 2.5) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        w = rng.uniform(0.4, 2.5) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        assert rll_residual(z, w, q, m) < 1e-12


@pytest.mark.parametrize("m", [1, 2, 3])
def test_l_inversion_identity(m):
    q = 1.23
    for z in (0.8, 1.9, 0.6 + 0.4j):
        assert l_inversion_residual(z, q, m) < 1e-12
        s = l_product_scalar(z, q, m)
        want = ((z * q ** ((m + 1) / 2) - q ** (-(m + 1) / 2) / z)
                * (q ** ((m + 1) / 2) / z - z * q ** (-(m + 1) / 2)))
        assert s == pytest.approx(want, rel=1e-12)


def test_l_operator_m1_is_gauged_r_matrix():
    # spin-1/2 L equals the 4x4 R up to the diagonal gauge with ratio q^{-1/2}
    q, z = 1.62, 0.77
    L = l_operator(z, q, 1)
    L4 = np.zeros((4, 4), dtype=complex)
    for a_out in range(2):
        for a_in in range(2):
            L4[2 * a_out:2 * a_out + 2, 2 * a_in:2 * a_in + 2] = \
                np.asarray(L[a_out, a_in])
    den = z * q - 1 / (z * q)
    D = np.diag([1.0, q ** -0.25, q ** 0.25, 1.0])
    gauged = D @ r_matrix(z, q) @ np.linalg.inv(D)
    assert np.allclose(L4 / den, gauged, atol=1e-13)


def test_charge_conservation_structure():
    # both R and L vanish unless in/out occupation totals agree
    R = r_matrix(1.3 + 0.2j, 0.8)
    for r in range(4):
        for cdx in range(4):
            n_out = (r >> 1) + (r & 1)
            n_in = (cdx >> 1) + (cdx & 1)
            if n_out != n_in:
                assert R[r, cdx] == 0
    m, q, z = 2, 1.4, 0.9
    L = l_operator(z, q, m)
    for a_out in range(2):
        for a_in in range(2):
            blk = np.asarray(L[a_out, a_in])
            for i in range(m + 1):
                for j in range(m + 1):
                    if (a_in - a_out) != (i - j) and abs(blk[i, j]) > 0:
                        raise AssertionError((a_out, a_in, i, j))


cplx_mod = st.floats(min_value=0.3, max_value=3.0)
angle = st.floats(min_value=0.0, max_value=2 * math.pi)


@given(zr=cplx_mod, za=angle, wr=cplx_mod, wa=angle,
       qi=st.sampled_from(range(len(Q_GRID))))
@settings(max_examples=50, deadline=None)
def test_yang_baxter_property(zr, za, wr, wa, qi):
    z = zr * cmath.exp(1j * za)
    w = wr * cmath.exp(1j * wa)
    assert yang_baxter_residual(z, w, Q_GRID[qi]) < 1e-11
