"""Quantum-group building blocks: R-matrix, higher-spin generators, L-operators.

Basis conventions: local 2-dim space indexed by a bit, 0 = occupied (up/left
arrow).  Tensor products order aux spaces before quantum spaces, most
significant factor first, matching the bit packing used in lattice/transfer.
"""

from __future__ import annotations

import itertools

import numpy as np

from .weights import VertexWeights, VERTEX_TYPES

__all__ = [
    "r_matrix",
    "rbar_matrix",
    "yang_baxter_residual",
    "weight_yang_baxter_residual",
    "irrep",
    "casimir",
    "l_operator",
    "l_product_scalar",
    "rll_residual",
]


def r_matrix(z, q):
    """Trigonometric z-graded R on C2 x C2: corners 1, middle mixing block.

    f = (z - 1/z) / (zq - 1/(zq)), g = (q - 1/q) / (zq - 1/(zq)); the
    off-diagonal entries carry z^{-1} g and z g.  R(1) is the permutation.
    Singular at zq = +-1; callers probing the degeneration should scale by
    (zq - 1/(zq)) first.
    """
    z, q = complex(z), complex(q)
    den = z * q - 1 / (z * q)
    f = (z - 1 / z) / den
    g = (q - 1 / q) / den
    R = np.zeros((4, 4), dtype=complex)
    R[0, 0] = R[3, 3] = 1.0
    R[1, 1] = R[2, 2] = f
    R[1, 2] = g / z
    R[2, 1] = g * z
    return R


def rbar_matrix(w: VertexWeights, H=0.0, V=0.0):
    """Weight-form vertex matrix: row (east, south), column (west, north).

    Index bits are 1-o, so the all-occupied corner sits at [0, 0].  Fields
    dress each admissible entry by exp(H(o_w+o_e-1)) exp(V(o_n+o_s-1)).
    Works elementwise for exact (Fraction) weights when H = V = 0.
    """
    exact = w.is_exact() and H == 0 and V == 0
    R = ([[0] * 4 for _ in range(4)] if exact
         else np.zeros((4, 4), dtype=complex if _any_complex(w) else float))
    table = w.table()
    for (ow, on, oe, os_), val in table.items():
        if not exact:
            val = val * np.exp(H * (ow + oe - 1) + V * (on + os_ - 1))
        row = (1 - oe) * 2 + (1 - os_)
        col = (1 - ow) * 2 + (1 - on)
        if exact:
            R[row][col] = val
        else:
            R[row, col] = val
    return R


def _any_complex(w):
    return any(isinstance(x, complex) for x in w.as_tuple())


def _embed3(R, slot_a, slot_b):
    """Place a 4x4 two-site operator on slots (a, b) of a 3-fold C2 product."""
    M = np.zeros((8, 8), dtype=complex)
    slots = (slot_a, slot_b)
    rest = [s for s in range(3) if s not in slots]
    for out_bits in itertools.product((0, 1), repeat=3):
        for in_bits in itertools.product((0, 1), repeat=3):
            if any(out_bits[s] != in_bits[s] for s in rest):
                continue
            r = out_bits[slot_a] * 2 + out_bits[slot_b]
            c = in_bits[slot_a] * 2 + in_bits[slot_b]
            if R[r, c] == 0:
                continue
            oi = out_bits[0] * 4 + out_bits[1] * 2 + out_bits[2]
            ii = in_bits[0] * 4 + in_bits[1] * 2 + in_bits[2]
            M[oi, ii] = R[r, c]
    return M


def yang_baxter_residual(z, w, q):
    """|| R12(z) R13(zw) R23(w) - R23(w) R13(zw) R12(z) || on C2^3.

    Multiplicative spectral parameters: the 13 argument is the product.
    """
    R12 = _embed3(r_matrix(z, q), 0, 1)
    R13 = _embed3(r_matrix(z * w, q), 0, 2)
    R23 = _embed3(r_matrix(w, q), 1, 2)
    lhs = R12 @ R13 @ R23
    rhs = R23 @ R13 @ R12
    return float(np.linalg.norm(lhs - rhs))


def weight_yang_baxter_residual(w12: VertexWeights, w13: VertexWeights,
                                w23: VertexWeights):
    """Residual of the weight-form equation for three symmetric weight sets.

    Holds when the three share the same anisotropy and their spectral
    parameters satisfy lam13 = lam12 + lam23 in the regime parametrization.
    Uses the symmetric 4x4 layout [[a,0,0,0],[0,b,c,0],[0,c,b,0],[0,0,0,a]].
    """
    def sym(wt):
        a, b, c = wt.a, wt.b, wt.c
        return np.array([[a, 0, 0, 0], [0, b, c, 0],
                         [0, c, b, 0], [0, 0, 0, a]], dtype=float)

    R12 = _embed3(sym(w12).astype(complex), 0, 1)
    R13 = _embed3(sym(w13).astype(complex), 0, 2)
    R23 = _embed3(sym(w23).astype(complex), 1, 2)
    lhs = R12 @ R13 @ R23
    rhs = R23 @ R13 @ R12
    scale = max(np.linalg.norm(lhs), 1.0)
    return float(np.linalg.norm(lhs - rhs) / scale)


def irrep(m, q):
    """Generators (k, e, f) of the (m+1)-dimensional representation.

    Basis v_0..v_m with
        k v_n = q^{m/2 - n} v_n
        e v_n = (q^n - q^{-n}) v_{n-1}
        f v_n = (q^{m-n} - q^{n-m}) v_{n+1}
    """
    q = complex(q)
    dim = m + 1
    k = np.diag([q ** (m / 2 - n) for n in range(dim)])
    e = np.zeros((dim, dim), dtype=complex)
    f = np.zeros((dim, dim), dtype=complex)
    for n in range(1, dim):
        e[n - 1, n] = q ** n - q ** (-n)
    for n in range(dim - 1):
        f[n + 1, n] = q ** (m - n) - q ** (n - m)
    return k, e, f


def casimir(m, q):
    """f e + k^2 q + k^{-2} q^{-1}; equals (q^{m+1} + q^{-m-1}) I."""
    k, e, f = irrep(m, q)
    return f @ e + k @ k * q + np.linalg.inv(k @ k) / q


def l_operator(z, q, m=1):
    """Aux-space 2x2 block L-operator with (m+1)-dim quantum entries.

    L = [[ z k q^{1/2} - z^{-1} k^{-1} q^{-1/2},  z^{-1} q^{-1/2} f ],
         [ z q^{1/2} e,  z k^{-1} q^{1/2} - z^{-1} k q^{-1/2} ]]
    returned as a (2, 2, m+1, m+1) array.
    """
    z, q = complex(z), complex(q)
    k, e, f = irrep(m, q)
    ki = np.linalg.inv(k)
    sq = q ** 0.5
    L = np.empty((2, 2, m + 1, m + 1), dtype=complex)
    L[0, 0] = z * sq * k - ki / (z * sq)
    L[0, 1] = f / (z * sq)
    L[1, 0] = z * sq * e
    L[1, 1] = z * sq * ki - k / (z * sq)
    return L


def l_product_scalar(z, q, m=1):
    """Scalar s(z) in the inversion identity, see l_inversion_residual."""
    z, q = complex(z), complex(q)
    return ((z * q ** ((m + 1) / 2) - q ** (-(m + 1) / 2) / z)
            * (q ** ((m + 1) / 2) / z - z * q ** (-(m + 1) / 2)))


def l_inversion_residual(z, q, m=1):
    """|| L(z) D L(1/z) D^{-1} - s(z) I || with aux gauge D = diag(1, z^2).

    The gauge makes the off-diagonal blocks of L(1/z) coincide with those
    of L(z); the product then collapses to the scalar l_product_scalar.
    """
    z, q = complex(z), complex(q)
    d = m + 1
    M = _l_as_matrix(l_operator(z, q, m))
    Mi = _l_as_matrix(l_operator(1 / z, q, m))
    D = np.diag(np.concatenate([np.ones(d), np.full(d, z ** 2)]))
    P = M @ D @ Mi @ np.linalg.inv(D)
    s = l_product_scalar(z, q, m)
    return float(np.linalg.norm(P - s * np.eye(2 * d)) / max(abs(s), 1.0))


def _l_as_matrix(L):
    """(2,2,d,d) blocks -> (2d, 2d) matrix, aux index most significant."""
    d = L.shape[2]
    M = np.zeros((2 * d, 2 * d), dtype=complex)
    for a in range(2):
        for b in range(2):
            M[a * d:(a + 1) * d, b * d:(b + 1) * d] = L[a, b]
    return M


def rll_residual(z, w, q, m=1):
    """|| R12(z/w) L1(z) L2(w) - L2(w) L1(z) R12(z/w) || / scale.

    Spaces ordered aux1 x aux2 x quantum; R acts on the two aux spaces,
    L1/L2 couple one aux each to the common quantum space.
    """
    d = m + 1
    R = np.kron(r_matrix(z / w, q), np.eye(d))
    L1 = np.zeros((4 * d, 4 * d), dtype=complex)
    L2 = np.zeros((4 * d, 4 * d), dtype=complex)
    Lz = l_operator(z, q, m)
    Lw = l_operator(w, q, m)
    for a in range(2):
        for b in range(2):
            blk1 = np.kron(np.eye(2), Lz[a, b])          # aux2 untouched
            blk2 = np.kron(np.eye(2), Lw[a, b])          # aux1 untouched
            L1[a * 2 * d:(a + 1) * 2 * d, b * 2 * d:(b + 1) * 2 * d] = blk1
            # L2 acts on aux2: interleave into the aux1-major layout
    # build L2 directly over combined aux basis (a1, a2)
    for a1 in range(2):
        for a2 in range(2):
            for b2 in range(2):
                r0 = (a1 * 2 + a2) * d
                c0 = (a1 * 2 + b2) * d
                L2[r0:r0 + d, c0:c0 + d] = Lw[a2, b2]
    lhs = R @ L1 @ L2
    rhs = L2 @ L1 @ R
    scale = max(np.linalg.norm(lhs), 1.0)
    return float(np.linalg.norm(lhs - rhs) / scale)
