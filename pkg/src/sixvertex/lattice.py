"""Finite-lattice machinery: exhaustive enumeration, heights, Monte Carlo.

Layout shared by the whole package: rows i = 0..M-1 run south to north,
columns j = 0..N-1 west to east.  v[i][j] is the vertical edge SOUTH of
vertex (i, j), h[i][j] the horizontal edge WEST of it.  On the torus the
north edge of row M-1 wraps to v[0]; on a square domain v has M+1 rows and
h has N+1 columns so the boundary edges are stored explicitly.

Everything here works in exact arithmetic when fed Fraction weights and
Fraction field factors x = e^H, y = e^V; this module is the oracle the
transfer-matrix route is checked against, so it never goes through matrix
algebra: partition sums are literal sums over explicitly enumerated states.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .weights import VERTEX_TYPES, VertexWeights

__all__ = [
    "Torus",
    "DwbcSquare",
    "Configuration",
    "enumerate_states",
    "enumerate_states_naive",
    "state_weight",
    "partition_brute",
    "correlation",
    "height_from_config",
    "config_from_height",
    "extremal_heights",
    "mc_sample",
    "McRun",
]


@dataclass(frozen=True)
class Torus:
    rows: int
    cols: int

    @property
    def n_edges(self):
        return 2 * self.rows * self.cols


@dataclass(frozen=True)
class DwbcSquare:
    """n x n vertices, domain-wall boundary: in occupations, the south and
    west boundary edges carry o=0, the north and east ones o=1."""

    n: int

    @property
    def n_edges(self):
        # free (interior) edges only; the 4n boundary edges are fixed
        return 2 * self.n * (self.n - 1)


@dataclass(frozen=True)
class Configuration:
    domain: object
    v: tuple  # tuple of row tuples
    h: tuple

    def occupations(self, i, j):
        """(o_w, o_n, o_e, o_s) of vertex (row i, col j)."""
        if isinstance(self.domain, Torus):
            M, N = self.domain.rows, self.domain.cols
            return (self.h[i][j], self.v[(i + 1) % M][j],
                    self.h[i][(j + 1) % N], self.v[i][j])
        return self.h[i][j], self.v[i + 1][j], self.h[i][j + 1], self.v[i][j]

    def shape(self):
        if isinstance(self.domain, Torus):
            return self.domain.rows, self.domain.cols
        return self.domain.n, self.domain.n

    def type_counts(self):
        M, N = self.shape()
        counts = dict.fromkeys(("a1", "a2", "b1", "b2", "c1", "c2"), 0)
        for i in range(M):
            for j in range(N):
                counts[VERTEX_TYPES[self.occupations(i, j)]] += 1
        return counts

    def field_exponents(self):
        """(n_H, n_V) with state weight = base * x^{n_H} * y^{n_V}."""
        M, N = self.shape()
        nh = nv = 0
        for i in range(M):
            for j in range(N):
                ow, on, oe, os_ = self.occupations(i, j)
                nh += ow + oe - 1
                nv += on + os_ - 1
        return nh, nv


def _row_fills(south, h_west, h_east, periodic):
    """All (north, hrow) consistent with the ice rule on one row.

    south: tuple of N south-edge occupations.  For periodic rows h_west is
    ignored and the west edge is summed over with the wrap constraint; for
    fixed boundaries h_west/h_east pin the outer horizontal edges.
    hrow returned has N+1 entries (west edge of each column plus the final
    east edge, equal to hrow[0] in the periodic case).
    """
    N = len(south)
    out = []
    starts = (0, 1) if periodic else (h_west,)
    for h0 in starts:
        stack = [(0, h0, (), (h0,))]
        while stack:
            j, ow, north, hrow = stack.pop()
            if j == N:
                last = hrow[-1]
                if periodic and last != h0:
                    continue
                if not periodic and last != h_east:
                    continue
                out.append((north, hrow))
                continue
            # ice rule o_w + o_n = o_e + o_s: with (o_w, o_s) known,
            # o_e - o_n = o_w - o_s; equal west/south leaves two choices
            if ow == south[j]:
                for t in (0, 1):
                    stack.append((j + 1, t, north + (t,), hrow + (t,)))
            else:
                oe, on = ow, 1 - ow
                stack.append((j + 1, oe, north + (on,), hrow + (oe,)))
    return out


def enumerate_states(domain, max_edges=28):
    """All ice-rule states, by row-by-row depth-first fill.

    Memoizes the per-row expansions keyed on the south profile, so the
    sweep only pays for branches that survive the ice rule.  Refuses
    domains with more than max_edges free edges.
    """
    if domain.n_edges > max_edges:
        raise ValueError(
            f"{domain.n_edges} free edges exceeds the cap {max_edges}")
    if isinstance(domain, Torus):
        return list(_torus_states(domain))
    if isinstance(domain, DwbcSquare):
        n = domain.n
        return list(_square_states(domain, (0,) * n, (1,) * n, 0, 1))
    raise TypeError(f"unsupported domain {domain!r}")


def _torus_states(domain):
    M, N = domain.rows, domain.cols
    fills = {}

    def row_fills(s):
        if s not in fills:
            fills[s] = _row_fills(s, None, None, True)
        return fills[s]

    for v0 in itertools.product((0, 1), repeat=N):
        partial = [(v0, (), ())]
        for i in range(M):
            nxt = []
            for south, vrows, hrows in partial:
                for north, hrow in row_fills(south):
                    nxt.append((north, vrows + (south,),
                                hrows + (hrow[:N],)))
            partial = nxt
        for north, vrows, hrows in partial:
            if north == v0:
                yield Configuration(domain, vrows, hrows)


def _square_states(domain, v_bottom, v_top, h_west, h_east):
    n = domain.n
    fills = {}

    def row_fills(s):
        if s not in fills:
            fills[s] = _row_fills(s, h_west, h_east, False)
        return fills[s]

    partial = [(v_bottom, (v_bottom,), ())]
    for i in range(n):
        nxt = []
        for south, vrows, hrows in partial:
            for north, hrow in row_fills(south):
                nxt.append((north, vrows + (north,), hrows + (hrow,)))
        partial = nxt
    for north, vrows, hrows in partial:
        if north == v_top:
            yield Configuration(domain, vrows, hrows)


def enumerate_states_naive(domain, max_edges=12):
    """Loop over every edge assignment and filter by the ice rule.

    Exponential in the edge count; exists purely to validate
    enumerate_states on tiny lattices.
    """
    if domain.n_edges > max_edges:
        raise ValueError(
            f"{domain.n_edges} free edges exceeds the naive cap {max_edges}")
    out = []
    if isinstance(domain, Torus):
        M, N = domain.rows, domain.cols
        for vbits in itertools.product((0, 1), repeat=M * N):
            v = tuple(vbits[i * N:(i + 1) * N] for i in range(M))
            for hbits in itertools.product((0, 1), repeat=M * N):
                h = tuple(hbits[i * N:(i + 1) * N] for i in range(M))
                cfg = Configuration(domain, v, h)
                if _ice_ok(cfg):
                    out.append(cfg)
        return out
    if isinstance(domain, DwbcSquare):
        n = domain.n
        for vbits in itertools.product((0, 1), repeat=(n - 1) * n):
            v = ((0,) * n,) + tuple(vbits[i * n:(i + 1) * n]
                                    for i in range(n - 1)) + ((1,) * n,)
            for hbits in itertools.product((0, 1), repeat=n * (n - 1)):
                h = tuple((0,) + hbits[i * (n - 1):(i + 1) * (n - 1)] + (1,)
                          for i in range(n))
                cfg = Configuration(domain, v, h)
                if _ice_ok(cfg):
                    out.append(cfg)
        return out
    raise TypeError(f"unsupported domain {domain!r}")


def _ice_ok(cfg):
    M, N = cfg.shape()
    for i in range(M):
        for j in range(N):
            ow, on, oe, os_ = cfg.occupations(i, j)
            if ow + on != oe + os_:
                return False
    return True


def state_weight(cfg: Configuration, w: VertexWeights, x=1, y=1):
    """Product of dressed vertex weights; exact for Fraction inputs."""
    table = w.table()
    M, N = cfg.shape()
    acc = 1
    for i in range(M):
        for j in range(N):
            occ = cfg.occupations(i, j)
            ow, on, oe, os_ = occ
            acc = acc * table[occ]
            eh, ev = ow + oe - 1, on + os_ - 1
            if eh:
                acc = acc * x if eh > 0 else acc / x
            if ev:
                acc = acc * y if ev > 0 else acc / y
    return acc


def partition_brute(domain, w: VertexWeights, x=1, y=1, max_edges=28):
    """Partition function as a literal sum over enumerated states."""
    return sum(state_weight(cfg, w, x, y)
               for cfg in enumerate_states(domain, max_edges))


def correlation(domain, w: VertexWeights, edges, x=1, y=1, max_edges=28):
    """<prod_e o_e> over the Boltzmann measure; edges like ("v", i, j)."""
    num = 0
    den = 0
    for cfg in enumerate_states(domain, max_edges):
        wt = state_weight(cfg, w, x, y)
        den += wt
        prod = 1
        for kind, i, j in edges:
            o = cfg.v[i][j] if kind == "v" else cfg.h[i][j]
            prod *= o
        if prod:
            num += wt * prod
    return num / den


# ---------------------------------------------------------------- heights

def height_from_config(cfg: Configuration) -> np.ndarray:
    """Heights on faces, hgt[X, Y] with X = 0..N, Y = 0..M, hgt[0,0] = 0.

    Crossing a vertical edge in +x adds its occupation; crossing a
    horizontal edge in +y adds its occupation.  The ice rule makes this
    path independent on simply connected domains; tori are refused.
    """
    if isinstance(cfg.domain, Torus):
        raise ValueError("height function needs a simply connected domain")
    M, N = cfg.shape()
    hgt = np.zeros((N + 1, M + 1), dtype=int)
    for Y in range(M + 1):
        if Y > 0:
            hgt[0, Y] = hgt[0, Y - 1] + cfg.h[Y - 1][0]
        for X in range(1, N + 1):
            hgt[X, Y] = hgt[X - 1, Y] + cfg.v[Y][X - 1]
    return hgt


def config_from_height(hgt, domain) -> Configuration:
    """Inverse of height_from_config; validates the step constraints."""
    if isinstance(domain, Torus):
        raise ValueError("height function needs a simply connected domain")
    hgt = np.asarray(hgt, dtype=int)
    n = domain.n
    if hgt.shape != (n + 1, n + 1):
        raise ValueError("height grid has the wrong shape")
    dx = np.diff(hgt, axis=0)
    dy = np.diff(hgt, axis=1)
    if not ((dx == 0) | (dx == 1)).all() or not ((dy == 0) | (dy == 1)).all():
        raise ValueError("height steps must lie in {0, 1}")
    v = tuple(tuple(int(dx[X, Y]) for X in range(n)) for Y in range(n + 1))
    h = tuple(tuple(int(dy[X, Y]) for X in range(n + 1)) for Y in range(n))
    # rows of v are indexed by Y, columns by X; h rows by Y, cols by X
    cfg = Configuration(domain, v, h)
    if not _ice_ok(cfg):
        raise ValueError("heights do not define an ice state")
    return cfg


def extremal_heights(domain):
    """Pointwise min and max height fields over all states of the domain.

    Uses the monotone 1-Lipschitz extension bounds from the fixed boundary
    heights: going from face B to face F the height can rise by at most
    max(0, Fx-Bx) + max(0, Fy-By) and fall by at most the mirrored amount.
    For the domain-wall square these come out as
    hmin = max(0, X+Y-n), hmax = min(X, Y).
    """
    if not isinstance(domain, DwbcSquare):
        raise TypeError("extremal heights implemented for DwbcSquare")
    n = domain.n
    bpts = []
    for X in range(n + 1):
        bpts.append((X, 0, 0))
        bpts.append((X, n, X))
    for Y in range(n + 1):
        bpts.append((0, Y, 0))
        bpts.append((n, Y, Y))
    hmin = np.full((n + 1, n + 1), -10 ** 9, dtype=int)
    hmax = np.full((n + 1, n + 1), 10 ** 9, dtype=int)
    for X in range(n + 1):
        for Y in range(n + 1):
            for bx, by, hb in bpts:
                up = hb + max(0, X - bx) + max(0, Y - by)
                dn = hb - max(0, bx - X) - max(0, by - Y)
                hmax[X, Y] = min(hmax[X, Y], up)
                hmin[X, Y] = max(hmin[X, Y], dn)
    return hmin, hmax


# ---------------------------------------------------------------- sampling

@dataclass
class McRun:
    mean_height: np.ndarray
    edge_mean_v: np.ndarray
    edge_mean_h: np.ndarray
    n_samples: int
    acceptance: float
    height_batches: np.ndarray  # per-batch mean heights, for error bars


def _weight_lut(w: VertexWeights, H, V):
    lut = np.zeros(16)
    for (ow, on, oe, os_), name in VERTEX_TYPES.items():
        base = float(getattr(w, name))
        lut[ow * 8 + on * 4 + oe * 2 + os_] = base * math.exp(
            H * (ow + oe - 1) + V * (on + os_ - 1))
    return lut


def _vertex_code(hgt, X, Y):
    # vertex with SW face (X, Y)
    ow = hgt[X, Y + 1] - hgt[X, Y]
    on = hgt[X + 1, Y + 1] - hgt[X, Y + 1]
    oe = hgt[X + 1, Y + 1] - hgt[X + 1, Y]
    os_ = hgt[X + 1, Y] - hgt[X, Y]
    return ow * 8 + on * 4 + oe * 2 + os_


def mc_sample(domain, w: VertexWeights, H=0.0, V=0.0, sweeps=2000,
              burn=500, sample_every=1, seed=0, kernel="metropolis",
              n_batches=20):
    """Metropolis sampling of the height function on a DWBC square.

    kernel="metropolis": sequential single-face +-1 proposals, correct for
    any positive weights.  kernel="checkerboard": all faces of one parity
    proposed at once; valid only when every dressed weight is equal (the
    uniform point), where acceptance reduces to the step constraints.
    Same-parity faces never share an edge, so their proposals do not
    interact in that case.
    """
    if not isinstance(domain, DwbcSquare):
        raise TypeError("mc_sample implemented for DwbcSquare")
    n = domain.n
    rng = np.random.default_rng(seed)
    hmin, hmax = extremal_heights(domain)
    hgt = np.array(hmin, dtype=np.int64)

    lut = _weight_lut(w, H, V)
    uniform = np.ptp(lut[lut > 0]) < 1e-12 * np.max(lut)
    if kernel == "checkerboard" and not uniform:
        raise ValueError("checkerboard kernel needs uniform dressed weights")

    n_int = n - 1
    if n_int < 1:
        raise ValueError("no interior faces to flip")

    # accumulators
    acc_height = np.zeros((n + 1, n + 1))
    batches = []
    batch_acc = np.zeros((n + 1, n + 1))
    batch_cnt = 0
    n_samples = 0
    accepted = 0
    proposed = 0

    per_batch = max(1, (sweeps - burn) // n_batches)

    if kernel == "checkerboard":
        X, Y = np.meshgrid(np.arange(1, n), np.arange(1, n), indexing="ij")
        masks = [((X + Y) % 2 == p) for p in (0, 1)]
        for sweep in range(sweeps):
            for p in (0, 1):
                mx, my = X[masks[p]], Y[masks[p]]
                delta = rng.choice((-1, 1), size=mx.size)
                newh = hgt[mx, my] + delta
                lo = np.maximum(np.maximum(hgt[mx - 1, my], hgt[mx, my - 1]),
                                np.maximum(hgt[mx + 1, my] - 1,
                                           hgt[mx, my + 1] - 1))
                hi = np.minimum(np.minimum(hgt[mx + 1, my], hgt[mx, my + 1]),
                                np.minimum(hgt[mx - 1, my] + 1,
                                           hgt[mx, my - 1] + 1))
                ok = (newh >= lo) & (newh <= hi)
                hgt[mx[ok], my[ok]] = newh[ok]
                accepted += int(ok.sum())
                proposed += ok.size
            if sweep >= burn and (sweep - burn) % sample_every == 0:
                acc_height += hgt
                batch_acc += hgt
                batch_cnt += 1
                n_samples += 1
                if batch_cnt == per_batch:
                    batches.append(batch_acc / batch_cnt)
                    batch_acc = np.zeros((n + 1, n + 1))
                    batch_cnt = 0
    else:
        flips_per_sweep = n_int * n_int
        for sweep in range(sweeps):
            xs = rng.integers(1, n, size=flips_per_sweep)
            ys = rng.integers(1, n, size=flips_per_sweep)
            ds = rng.choice((-1, 1), size=flips_per_sweep)
            us = rng.random(size=flips_per_sweep)
            for k in range(flips_per_sweep):
                Xf, Yf, d = int(xs[k]), int(ys[k]), int(ds[k])
                old = hgt[Xf, Yf]
                new = old + d
                if (new < hgt[Xf - 1, Yf] or new > hgt[Xf + 1, Yf]
                        or new < hgt[Xf, Yf - 1] or new > hgt[Xf, Yf + 1]
                        or new > hgt[Xf - 1, Yf] + 1
                        or new < hgt[Xf + 1, Yf] - 1
                        or new > hgt[Xf, Yf - 1] + 1
                        or new < hgt[Xf, Yf + 1] - 1):
                    proposed += 1
                    continue
                ratio = 1.0
                if not uniform:
                    num = den = 1.0
                    for Xv in (Xf - 1, Xf):
                        for Yv in (Yf - 1, Yf):
                            den *= lut[_vertex_code(hgt, Xv, Yv)]
                    hgt[Xf, Yf] = new
                    for Xv in (Xf - 1, Xf):
                        for Yv in (Yf - 1, Yf):
                            num *= lut[_vertex_code(hgt, Xv, Yv)]
                    hgt[Xf, Yf] = old
                    ratio = num / den
                proposed += 1
                if ratio >= 1.0 or us[k] < ratio:
                    hgt[Xf, Yf] = new
                    accepted += 1
            if sweep >= burn and (sweep - burn) % sample_every == 0:
                acc_height += hgt
                batch_acc += hgt
                batch_cnt += 1
                n_samples += 1
                if batch_cnt == per_batch:
                    batches.append(batch_acc / batch_cnt)
                    batch_acc = np.zeros((n + 1, n + 1))
                    batch_cnt = 0

    mean_h = acc_height / max(n_samples, 1)
    edge_v = np.diff(mean_h, axis=0)  # (n, n+1): columns X, rows Y
    edge_h = np.diff(mean_h, axis=1)
    return McRun(mean_height=mean_h, edge_mean_v=edge_v, edge_mean_h=edge_h,
                 n_samples=n_samples, acceptance=accepted / max(proposed, 1),
                 height_batches=np.array(batches))
