"""Staggered six-vertex model on the square lattice.

Defines the six vertex states, the two-sublattice staggered energies, arrow
configurations with their line representation, and two independent
small-lattice oracles: exhaustive ice-rule enumeration and a two-column
transfer matrix.

Conventions (used consistently across the package):

* rows increase downward, columns to the right; vertex (0, 0) is on
  sublattice A, and ``(r + c) % 2`` selects the sublattice.
* horizontal arrow bit 1 = arrow points east; vertical bit 1 = points north.
* the reference ground state has every A vertex in state 6 and every
  B vertex in state 5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import scipy.sparse.linalg as spla

from . import _kernels
from .errors import IceRuleViolation, NonConvergence, TooLarge

FREE_FERMION_BETA_EPS = 0.5 * math.log(2.0)

ENUMERATION_EDGE_BOUND = 24

#: arrow bits (W, E, N, S) for each vertex state
STATE_BITS = {
    1: (1, 1, 1, 1),
    2: (0, 0, 0, 0),
    3: (1, 1, 0, 0),
    4: (0, 0, 1, 1),
    5: (1, 0, 1, 0),
    6: (0, 1, 0, 1),
}

VERTEX_STATES = (1, 2, 3, 4, 5, 6)


class Boundary(Enum):
    PERIODIC = "periodic"
    FIXED_GROUND_STATE = "fixed-ground-state"


class Sublattice(Enum):
    A = "A"
    B = "B"


def sublattice(row: int, col: int) -> Sublattice:
    return Sublattice.A if (row + col) % 2 == 0 else Sublattice.B


@dataclass(frozen=True)
class ModelParams:
    """Reduced couplings and lattice geometry.

    ``beta_eps`` is the reduced energy of the four non-staggered states;
    ``beta_s`` the reduced staggered field; ``u_shift`` the offset from the
    solvable point, beta_eps = ln(2)/2 + u_shift.
    """

    beta_s: float
    rows: int
    cols: int
    beta_eps: float = FREE_FERMION_BETA_EPS
    boundary: Boundary = Boundary.FIXED_GROUND_STATE

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("lattice dimensions must be >= 1")
        if self.boundary is Boundary.PERIODIC and (
                self.rows % 2 or self.cols % 2):
            raise ValueError(
                "periodic staggered lattices need even rows and cols")

    @property
    def u_shift(self) -> float:
        return self.beta_eps - FREE_FERMION_BETA_EPS

    def with_u_shift(self, u: float) -> "ModelParams":
        return replace(self, beta_eps=FREE_FERMION_BETA_EPS + u)


def vertex_energy(state: int, sub: Sublattice, params: ModelParams) -> float:
    """Reduced energy of one vertex (the Hamiltonian sums -1 times these)."""
    if state not in STATE_BITS:
        raise ValueError(f"invalid vertex state {state}")
    if state <= 4:
        return params.beta_eps
    sign = 1.0 if state == 5 else -1.0
    if sub is Sublattice.B:
        sign = -sign
    return sign * params.beta_s


def _reference_bits(params: ModelParams):
    """Arrow bits of the reference ground state in ArrowConfig layout."""
    n, m = params.rows, params.cols
    rr = np.arange(n)[:, None]
    if params.boundary is Boundary.PERIODIC:
        cc = np.arange(m)[None, :]
        h = ((rr + cc) % 2 == 0).astype(np.uint8)       # east vertex is B
        v = ((rr + cc) % 2 == 0).astype(np.uint8)       # north vertex is A
    else:
        h = ((rr + np.arange(m + 1)[None, :]) % 2 == 1).astype(np.uint8)
        v = ((np.arange(n + 1)[:, None] + np.arange(m)[None, :]) % 2
             == 1).astype(np.uint8)
    return h, v


@dataclass(frozen=True)
class ArrowConfig:
    """Full arrow configuration.

    Periodic layout: ``h[r, c]`` is the east edge of vertex (r, c) and
    ``v[r, c]`` its south edge, both wrapping.  Fixed-boundary layout:
    ``h[r, c]`` is the west edge of vertex (r, c) (so ``h`` has cols+1
    columns) and ``v[r, c]`` the north edge (rows+1 rows); the outermost
    entries are the fixed boundary arrows.
    """

    rows: int
    cols: int
    boundary: Boundary
    h: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)

    def incident_bits(self, row: int, col: int) -> tuple[int, int, int, int]:
        """(W, E, N, S) arrow bits at a vertex."""
        n, m = self.rows, self.cols
        if self.boundary is Boundary.PERIODIC:
            return (int(self.h[row, (col - 1) % m]), int(self.h[row, col]),
                    int(self.v[(row - 1) % n, col]), int(self.v[row, col]))
        return (int(self.h[row, col]), int(self.h[row, col + 1]),
                int(self.v[row, col]), int(self.v[row + 1, col]))

    def reversed(self) -> "ArrowConfig":
        return ArrowConfig(self.rows, self.cols, self.boundary,
                           (1 - self.h).astype(np.uint8),
                           (1 - self.v).astype(np.uint8))

    def to_string(self) -> str:
        hs = "".join(str(b) for b in self.h.ravel())
        vs = "".join(str(b) for b in self.v.ravel())
        return f"H:{hs};V:{vs}"

    @classmethod
    def from_string(cls, text: str, params: ModelParams) -> "ArrowConfig":
        hpart, vpart = text.split(";")
        hbits = np.array([int(b) for b in hpart.removeprefix("H:")],
                         dtype=np.uint8)
        vbits = np.array([int(b) for b in vpart.removeprefix("V:")],
                         dtype=np.uint8)
        h_shape, v_shape = _config_shapes(params)
        return cls(params.rows, params.cols, params.boundary,
                   hbits.reshape(h_shape), vbits.reshape(v_shape))


def _config_shapes(params: ModelParams):
    n, m = params.rows, params.cols
    if params.boundary is Boundary.PERIODIC:
        return (n, m), (n, m)
    return (n, m + 1), (n + 1, m)


def ground_state_config(params: ModelParams) -> ArrowConfig:
    h, v = _reference_bits(params)
    return ArrowConfig(params.rows, params.cols, params.boundary, h, v)


def classify_vertex(config: ArrowConfig, site: tuple[int, int]) -> int:
    """Vertex state 1..6 at ``site``; IceRuleViolation otherwise."""
    w, e, nn, s = config.incident_bits(*site)
    state = int(_kernels.PATTERN_TO_STATE[w * 8 + e * 4 + nn * 2 + s])
    if state == 0:
        raise IceRuleViolation(f"vertex {site} is not two-in/two-out")
    return state


def reduced_hamiltonian(config: ArrowConfig, params: ModelParams) -> float:
    """H(c) = -sum of reduced vertex energies."""
    total = 0.0
    for r in range(params.rows):
        for c in range(params.cols):
            state = classify_vertex(config, (r, c))
            total -= vertex_energy(state, sublattice(r, c), params)
    return total


@dataclass(frozen=True)
class LineConfig:
    """Edge occupation bits: 1 where the arrow opposes the reference
    ground state.  Same array layout as ArrowConfig."""

    rows: int
    cols: int
    boundary: Boundary
    h: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)

    def lines_at(self, row: int, col: int) -> tuple[int, int, int, int]:
        cfg = ArrowConfig(self.rows, self.cols, self.boundary, self.h, self.v)
        return cfg.incident_bits(row, col)


def line_representation(config: ArrowConfig, params: ModelParams) -> LineConfig:
    for r in range(params.rows):
        for c in range(params.cols):
            classify_vertex(config, (r, c))
    h_ref, v_ref = _reference_bits(params)
    return LineConfig(config.rows, config.cols, config.boundary,
                      np.bitwise_xor(config.h, h_ref),
                      np.bitwise_xor(config.v, v_ref))


# --- exhaustive enumeration oracle -------------------------------------------

def _edge_layout(params: ModelParams):
    """Free-edge indexing plus per-vertex slot tables for the scan kernel.

    Returns (free_edges, slots, fixed_bits) where free_edges is a
    deterministic list of ('h'|'v', r, c) descriptors, slots[vertex, k] the
    free-edge index feeding arrow slot k (W, E, N, S) or -1, and fixed_bits
    the boundary arrow bits for -1 slots.
    """
    n, m = params.rows, params.cols
    free_edges = []
    h_index = {}
    v_index = {}
    if params.boundary is Boundary.PERIODIC:
        for r in range(n):
            for c in range(m):
                h_index[(r, c)] = len(free_edges)
                free_edges.append(("h", r, c))
        for r in range(n):
            for c in range(m):
                v_index[(r, c)] = len(free_edges)
                free_edges.append(("v", r, c))
    else:
        for r in range(n):
            for c in range(1, m):
                h_index[(r, c)] = len(free_edges)
                free_edges.append(("h", r, c))
        for r in range(1, n):
            for c in range(m):
                v_index[(r, c)] = len(free_edges)
                free_edges.append(("v", r, c))
    h_ref, v_ref = _reference_bits(params)
    slots = np.full((n * m, 4), -1, dtype=np.int32)
    fixed = np.zeros((n * m, 4), dtype=np.int8)
    for r in range(n):
        for c in range(m):
            vtx = r * m + c
            if params.boundary is Boundary.PERIODIC:
                keys = [("h", r, (c - 1) % m), ("h", r, c),
                        ("v", (r - 1) % n, c), ("v", r, c)]
            else:
                keys = [("h", r, c), ("h", r, c + 1),
                        ("v", r, c), ("v", r + 1, c)]
            for k, (kind, er, ec) in enumerate(keys):
                idx = (h_index if kind == "h" else v_index).get((er, ec))
                if idx is not None:
                    slots[vtx, k] = idx
                else:
                    ref = h_ref if kind == "h" else v_ref
                    fixed[vtx, k] = ref[er, ec]
    return free_edges, slots, fixed


def _energy_table(params: ModelParams) -> np.ndarray:
    n, m = params.rows, params.cols
    table = np.zeros((n * m, 7))
    for r in range(n):
        for c in range(m):
            for state in VERTEX_STATES:
                table[r * m + c, state] = vertex_energy(
                    state, sublattice(r, c), params)
    return table


@dataclass(frozen=True)
class EnumerationResult:
    z: float
    masks: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    free_edges: list = field(repr=False)


def enumerate_partition(params: ModelParams) -> EnumerationResult:
    """Exact Z = sum_c exp(H(c)) over all ice-rule configurations.

    Configurations are reported in ascending bit-mask order over the free
    edges (deterministic, independent of the kernel backend).
    """
    free_edges, slots, fixed = _edge_layout(params)
    if len(free_edges) > ENUMERATION_EDGE_BOUND:
        raise TooLarge(
            f"{len(free_edges)} free edges exceeds the enumeration bound "
            f"{ENUMERATION_EDGE_BOUND}")
    masks, weights = _kernels.ice_scan(
        len(free_edges), slots, fixed, _energy_table(params))
    return EnumerationResult(float(np.sum(weights)), masks, weights, free_edges)


def config_from_mask(params: ModelParams, mask: int) -> ArrowConfig:
    """Rebuild the full arrow configuration for one enumeration mask."""
    free_edges, _, _ = _edge_layout(params)
    h, v = _reference_bits(params)
    h = h.copy()
    v = v.copy()
    if params.boundary is Boundary.PERIODIC:
        h[:] = 0
        v[:] = 0
    for bit, (kind, r, c) in enumerate(free_edges):
        target = h if kind == "h" else v
        target[r, c] = (mask >> bit) & 1
    return ArrowConfig(params.rows, params.cols, params.boundary, h, v)


# --- transfer-matrix oracle --------------------------------------------------

def _column_tensors(params: ModelParams):
    """Per-sublattice local tensors W[bn, bs, hw, he] = vertex weight."""
    tensors = {}
    for sub in (Sublattice.A, Sublattice.B):
        w = np.zeros((2, 2, 2, 2))
        for state, (wb, eb, nb, sb) in STATE_BITS.items():
            w[nb, sb, wb, eb] = math.exp(-vertex_energy(state, sub, params))
        tensors[sub] = w
    return tensors[Sublattice.A], tensors[Sublattice.B]


def _apply_column(psi: np.ndarray, parity: int, wa: np.ndarray,
                  wb: np.ndarray, n_rows: int) -> np.ndarray:
    """One column of the transfer matrix applied to a 2^N interface vector.

    The interface holds the horizontal arrow bits of the N rows (row 0 most
    significant); the N vertical bond bits within the column are contracted
    row by row with the periodic bond traced at the end.
    """
    # B[a, b, remaining h_in, done h_out]
    b = np.zeros((2, 2, 1 << n_rows, 1))
    b[0, 0, :, 0] = psi
    b[1, 1, :, 0] = psi
    for r in range(n_rows):
        w = wa if (r + parity) % 2 == 0 else wb
        rest = 1 << (n_rows - 1 - r)
        done = 1 << r
        b = b.reshape(2, 2, 2, rest, done)
        # contract bond and the incoming h bit of this row
        b = np.einsum("byhe,abhrd->ayrde", w, b)
        b = b.reshape(2, 2, rest, done * 2)
    return b[0, 0, 0, :] + b[1, 1, 0, :]


@dataclass(frozen=True)
class TransferResult:
    free_energy: float
    gap: float


def transfer_matrix_free_energy(params: ModelParams,
                                tol: float = 1e-13) -> TransferResult:
    """Reduced free energy per vertex in the infinite-column limit.

    Diagonalizes the two-column operator (two columns absorb the A/B
    staggering); returns f = ln(lambda_max) / (2 N) and the relative gap
    |lambda_2| / |lambda_1| as a convergence diagnostic.
    """
    if params.boundary is not Boundary.PERIODIC:
        raise ValueError("transfer matrix requires periodic boundary")
    n = params.rows
    if n % 2 or n > 12:
        raise ValueError("rows must be even and <= 12")
    wa, wb = _column_tensors(params)
    dim = 1 << n

    def matvec(psi):
        out = _apply_column(psi, 0, wa, wb, n)
        return _apply_column(out, 1, wa, wb, n)

    if dim <= 256:
        dense = np.empty((dim, dim))
        eye = np.eye(dim)
        for j in range(dim):
            dense[:, j] = matvec(eye[:, j])
        evals = np.sort(np.abs(np.linalg.eigvals(dense)))[::-1]
    else:
        op = spla.LinearOperator((dim, dim), matvec=matvec)
        v0 = np.full(dim, 1.0 / math.sqrt(dim))
        try:
            evals = spla.eigs(op, k=2, which="LM", v0=v0, tol=tol,
                              return_eigenvectors=False)
        except spla.ArpackNoConvergence as exc:
            raise NonConvergence("transfer-matrix eigensolve stalled") from exc
        evals = np.sort(np.abs(evals))[::-1]
    lam1, lam2 = float(evals[0]), float(evals[1])
    if not np.isfinite(lam1) or lam1 <= 0:
        raise NonConvergence("non-positive leading eigenvalue")
    return TransferResult(math.log(lam1) / (2 * n), lam2 / lam1)


def transfer_partition(params: ModelParams, n_cols: int | None = None) -> float:
    """Finite-torus Z via the trace of the column-operator product."""
    if params.boundary is not Boundary.PERIODIC:
        raise ValueError("transfer partition requires periodic boundary")
    m = params.cols if n_cols is None else n_cols
    if m % 2:
        raise ValueError("column count must be even")
    n = params.rows
    wa, wb = _column_tensors(params)
    dim = 1 << n
    total = 0.0
    for j in range(dim):
        psi = np.zeros(dim)
        psi[j] = 1.0
        for c in range(m):
            psi = _apply_column(psi, c % 2, wa, wb, n)
        total += psi[j]
    return total
