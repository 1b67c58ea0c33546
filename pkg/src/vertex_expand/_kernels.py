"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Set ``VERTEX_EXPAND_NO_NUMBA=1`` to force the numpy path (useful on machines
where JIT compilation is unwanted and for A/B benchmarking; see
``benchmarks/bench_kernels.py``).  ``VERTEX_EXPAND_THREADS`` caps numba's
thread pool.  Both paths scan configurations / grid points in the same
deterministic order.
"""

from __future__ import annotations

import math
import os

import numpy as np

_flag = os.environ.get("VERTEX_EXPAND_NO_NUMBA", "").strip().lower()
NUMBA_ENABLED = _flag not in ("1", "true", "yes")

if NUMBA_ENABLED:
    try:
        import numba
        from numba import njit
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    _threads = os.environ.get("VERTEX_EXPAND_THREADS", "").strip()
    if _threads.isdigit() and int(_threads) > 0:
        numba.set_num_threads(min(int(_threads), numba.config.NUMBA_NUM_THREADS))


# Incident arrow bits (W, E, N, S) packed as w*8 + e*4 + n*2 + s.
# Horizontal bits: 1 = arrow points east; vertical bits: 1 = arrow points
# north.  Exactly the six two-in/two-out patterns map to a state; 0 marks an
# ice-rule violation.
PATTERN_TO_STATE = np.zeros(16, dtype=np.int8)
PATTERN_TO_STATE[0b1111] = 1
PATTERN_TO_STATE[0b0000] = 2
PATTERN_TO_STATE[0b1100] = 3
PATTERN_TO_STATE[0b0011] = 4
PATTERN_TO_STATE[0b1010] = 5
PATTERN_TO_STATE[0b0101] = 6


def _ice_scan_numpy(n_edges, slots, fixed_bits, energies, masks_out, weights_out):
    n_vert = slots.shape[0]
    total = 1 << n_edges
    count = 0
    chunk = 1 << 16
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        ham = np.zeros(masks.shape[0])
        valid = np.ones(masks.shape[0], dtype=bool)
        for v in range(n_vert):
            pattern = np.zeros(masks.shape[0], dtype=np.int8)
            for k in range(4):
                s = slots[v, k]
                bit = (masks >> s) & 1 if s >= 0 else fixed_bits[v, k]
                pattern |= (bit << (3 - k)).astype(np.int8)
            state = PATTERN_TO_STATE[pattern]
            valid &= state != 0
            ham -= energies[v, state]
        idx = np.nonzero(valid)[0]
        m = idx.shape[0]
        if count + m <= masks_out.shape[0]:
            masks_out[count:count + m] = masks[idx]
            weights_out[count:count + m] = np.exp(ham[idx])
        count += m
    return count


if NUMBA_ENABLED:

    @njit(cache=True)
    def _ice_scan_numba(n_edges, slots, fixed_bits, energies, masks_out,
                        weights_out, table):
        n_vert = slots.shape[0]
        total = 1 << n_edges
        count = 0
        for mask in range(total):
            ham = 0.0
            ok = True
            for v in range(n_vert):
                pattern = 0
                for k in range(4):
                    s = slots[v, k]
                    if s >= 0:
                        bit = (mask >> s) & 1
                    else:
                        bit = fixed_bits[v, k]
                    pattern = (pattern << 1) | bit
                state = table[pattern]
                if state == 0:
                    ok = False
                    break
                ham -= energies[v, state]
            if ok:
                if count < masks_out.shape[0]:
                    masks_out[count] = mask
                    weights_out[count] = math.exp(ham)
                count += 1
        return count


def ice_scan(n_edges, slots, fixed_bits, energies):
    """All ice-rule configurations over ``n_edges`` free arrow bits.

    Returns (masks, weights) in ascending-mask order; ``weights[i]`` is
    exp(H) for the configuration encoded by ``masks[i]``.
    """
    slots = np.ascontiguousarray(slots, dtype=np.int32)
    fixed_bits = np.ascontiguousarray(fixed_bits, dtype=np.int8)
    energies = np.ascontiguousarray(energies, dtype=np.float64)
    # Conservative upper bound on the ice-state count: grows far slower than
    # 2^E, but allocate lazily in two passes only when E is large.
    cap = 1 << min(n_edges, 22)
    masks_out = np.empty(cap, dtype=np.int64)
    weights_out = np.empty(cap, dtype=np.float64)
    if NUMBA_ENABLED:
        count = _ice_scan_numba(n_edges, slots, fixed_bits, energies,
                                masks_out, weights_out, PATTERN_TO_STATE)
    else:
        count = _ice_scan_numpy(n_edges, slots, fixed_bits, energies,
                                masks_out, weights_out)
    if count > cap:  # pragma: no cover - ice states never approach 2^22
        raise RuntimeError("ice-state buffer overflow; raise the cap")
    return masks_out[:count].copy(), weights_out[:count].copy()


# --- midpoint-grid reductions for the double integrals -----------------------
#
# All three integrands depend on the angles only through cos(theta1)*cos(theta2),
# so kernels receive the midpoint cosine vector and reduce over the full
# tensor grid.

def _midpoint_cos(n: int) -> np.ndarray:
    h = 2.0 * np.pi / n
    return np.cos((np.arange(n) + 0.5) * h)


def _grid_sum_numpy(kind, n, a, b):
    c = _midpoint_cos(n)
    total = 0.0
    block = 64
    for start in range(0, n, block):
        cc = np.multiply.outer(c[start:start + block], c)
        if kind == 0:
            vals = np.log(2.0 * a + 2.0 * cc)
        elif kind == 1:
            vals = b / (a + cc)
        else:
            vals = (b + cc) / (a + cc)
        total += float(np.sum(vals))
    return total


if NUMBA_ENABLED:

    @njit(cache=True)
    def _grid_sum_numba(kind, n, a, b, c):
        total = 0.0
        for i in range(n):
            ci = c[i]
            row = 0.0
            for j in range(n):
                cc = ci * c[j]
                if kind == 0:
                    row += math.log(2.0 * a + 2.0 * cc)
                elif kind == 1:
                    row += b / (a + cc)
                else:
                    row += (b + cc) / (a + cc)
            total += row
        return total


def grid_sum(kind: int, n: int, a: float, b: float = 0.0) -> float:
    """Sum of an integrand over the n-by-n midpoint grid on [0, 2*pi]^2.

    kind 0: ln(2a + 2 cos cos)          (free energy; a = cosh 2*beta_s)
    kind 1: b / (a + cos cos)           (field derivative; b = sinh 2*beta_s)
    kind 2: (b + cos cos) / (a + cos cos)  (b-vertex ratio; b = exp(-2*beta_s))
    """
    if NUMBA_ENABLED:
        return _grid_sum_numba(kind, n, float(a), float(b), _midpoint_cos(n))
    return _grid_sum_numpy(kind, n, float(a), float(b))
