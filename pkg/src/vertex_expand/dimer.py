"""Decorated-lattice dimer machinery.

Each vertex of the original lattice becomes a "city" of four nodes (left,
top, right, bottom) joined by a diamond of internal edges of weight u;
adjacent cities are joined by external edges of weight C.  At the solvable
point the close-packed dimer model on this lattice reproduces the six-vertex
partition function, and the signed adjacency matrix R of a face-parity
(Pfaffian) orientation gives Z^2 = det R.

Node indexing is city-major: node = 4*(row*cols + col) + k with
k = 0 left, 1 top, 2 right, 3 bottom.  The edge list order is fixed
(internal diamonds city by city, then horizontal externals, then vertical
externals) so edge indices are reproducible across runs.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import (ConstraintConflict, NotFreeFermion, OrientationFailure,
                     SingularMatrix, TooLarge, TooManyConstraints)
from .model import (FREE_FERMION_BETA_EPS, Boundary, LineConfig, ModelParams,
                    STATE_BITS, sublattice, Sublattice)

MATCHING_NODE_BOUND = 36
CONSTRAINT_BOUND = 5

_NODE_OFFSET = {0: (-1.0, 0.0), 1: (0.0, 1.0), 2: (1.0, 0.0), 3: (0.0, -1.0)}


@dataclass(frozen=True)
class Edge:
    i: int
    j: int
    weight: float
    kind: str  # "internal" | "external-h" | "external-v"


@dataclass(frozen=True)
class EdgeConstraint:
    edge: int
    occupied: bool


@dataclass(frozen=True)
class DecoratedLattice:
    rows: int
    cols: int
    beta_s: float
    weight_c: float
    weight_u: float
    edges: tuple[Edge, ...] = field(repr=False)
    coords: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return 4 * self.rows * self.cols

    def node(self, row: int, col: int, k: int) -> int:
        return 4 * (row * self.cols + col) + k

    def external_h(self, row: int, col: int) -> int:
        """Edge index of the horizontal external edge east of city (row, col)."""
        if not (0 <= col < self.cols - 1):
            raise IndexError("no external edge there")
        return 4 * self.rows * self.cols + row * (self.cols - 1) + col

    def external_v(self, row: int, col: int) -> int:
        """Edge index of the vertical external edge south of city (row, col)."""
        if not (0 <= row < self.rows - 1):
            raise IndexError("no external edge there")
        return (4 * self.rows * self.cols + self.rows * (self.cols - 1)
                + row * self.cols + col)

    def internal(self, row: int, col: int, k: int) -> int:
        """Internal diamond edge k of a city: 0 L-T, 1 T-R, 2 R-B, 3 B-L."""
        return 4 * (row * self.cols + col) + k


def build_decorated(params: ModelParams) -> DecoratedLattice:
    """City decoration of the lattice at the solvable point.

    Weights: C = exp(-beta_s/2) on external edges, u = (sqrt2/2)
    exp(beta_s/2) on internal ones; requires beta_eps = ln(2)/2 and the
    fixed ground-state boundary (lines cannot cross the boundary, so no
    external stubs are needed and the graph stays planar-with-boundary).
    """
    if abs(params.beta_eps - FREE_FERMION_BETA_EPS) > 1e-12:
        raise NotFreeFermion(
            f"beta_eps={params.beta_eps!r} is off the solvable point")
    if params.boundary is not Boundary.FIXED_GROUND_STATE:
        raise ValueError("decorated lattice uses the fixed ground-state boundary")
    n, m = params.rows, params.cols
    c_w = math.exp(-0.5 * params.beta_s)
    u_w = 0.5 * math.sqrt(2.0) * math.exp(0.5 * params.beta_s)

    coords = np.zeros((4 * n * m, 2))
    for r in range(n):
        for c in range(m):
            cx, cy = 4.0 * c, -4.0 * r
            for k, (dx, dy) in _NODE_OFFSET.items():
                coords[4 * (r * m + c) + k] = (cx + dx, cy + dy)

    def node(r, c, k):
        return 4 * (r * m + c) + k

    edges = []
    for r in range(n):
        for c in range(m):
            for a, b in ((0, 1), (1, 2), (2, 3), (3, 0)):
                edges.append(Edge(node(r, c, a), node(r, c, b), u_w, "internal"))
    for r in range(n):
        for c in range(m - 1):
            edges.append(Edge(node(r, c, 2), node(r, c + 1, 0), c_w, "external-h"))
    for r in range(n - 1):
        for c in range(m):
            edges.append(Edge(node(r, c, 3), node(r + 1, c, 1), c_w, "external-v"))
    return DecoratedLattice(n, m, params.beta_s, c_w, u_w, tuple(edges), coords)


# --- planar faces and the parity orientation ---------------------------------

def _planar_faces(lat: DecoratedLattice):
    """Bounded faces as cyclic lists of edge indices with traversal signs.

    Uses the rotation system induced by node coordinates.  Each face is a
    pair (cycle, ccw) where cycle is a list of (edge_index, along) pairs
    (``along`` True when the traversal runs i -> j in edge-list order) and
    ``ccw`` records the rotational sense of the traversal.  The outer face
    (largest enclosed area) is dropped.
    """
    nbrs: dict[int, list[tuple[float, int, int]]] = {i: [] for i in range(lat.n_nodes)}
    for e_idx, e in enumerate(lat.edges):
        for a, b in ((e.i, e.j), (e.j, e.i)):
            dx, dy = lat.coords[b] - lat.coords[a]
            nbrs[a].append((math.atan2(dy, dx), b, e_idx))
    for a in nbrs:
        nbrs[a].sort()

    def next_half_edge(a, b):
        # face to the left of a->b: rotate the reversed edge ccw around b
        ring = nbrs[b]
        pos = next(p for p, (_, tgt, _) in enumerate(ring) if tgt == a)
        _, nxt, e_idx = ring[(pos + 1) % len(ring)]
        return b, nxt, e_idx

    edge_of = {}
    for e_idx, e in enumerate(lat.edges):
        edge_of[(e.i, e.j)] = e_idx
        edge_of[(e.j, e.i)] = e_idx

    seen = set()
    faces = []
    for e_idx, e in enumerate(lat.edges):
        for start in ((e.i, e.j), (e.j, e.i)):
            if start in seen:
                continue
            cycle = []
            area = 0.0
            a, b = start
            while (a, b) not in seen:
                seen.add((a, b))
                idx = edge_of[(a, b)]
                cycle.append((idx, (lat.edges[idx].i, lat.edges[idx].j) == (a, b)))
                xa, ya = lat.coords[a]
                xb, yb = lat.coords[b]
                area += xa * yb - xb * ya
                a, b, _ = next_half_edge(a, b)
            faces.append((cycle, area))
    if len(faces) <= 1:
        return []
    outer = max(range(len(faces)), key=lambda f: abs(faces[f][1]))
    return [(cycle, area > 0) for f, (cycle, area) in enumerate(faces)
            if f != outer]


class KasteleynMatrix:
    """Signed anti-symmetric adjacency matrix of a Pfaffian orientation.

    ``signs[e]`` is +1 when edge e is oriented i -> j in edge-list order.
    The inverse and log-determinant are memoized behind a lock so concurrent
    queries share one factorization.
    """

    def __init__(self, lattice: DecoratedLattice, signs: np.ndarray):
        self.lattice = lattice
        self.signs = signs
        n = lattice.n_nodes
        r = np.zeros((n, n))
        for e, s in zip(lattice.edges, signs):
            r[e.i, e.j] = s * e.weight
            r[e.j, e.i] = -s * e.weight
        self.matrix = r
        self._lock = threading.Lock()
        self._inverse: np.ndarray | None = None
        self._logdet: float | None = None

    def inverse(self) -> np.ndarray:
        with self._lock:
            if self._inverse is None:
                try:
                    self._inverse = np.linalg.inv(self.matrix)
                except np.linalg.LinAlgError as exc:
                    raise SingularMatrix("no perfect matching") from exc
            return self._inverse

    def log_det(self) -> float:
        with self._lock:
            if self._logdet is None:
                sign, logabs = np.linalg.slogdet(self.matrix)
                if sign <= 0:
                    raise SingularMatrix(
                        "det R is not positive (no perfect matching)")
                self._logdet = float(logabs)
            return self._logdet

    def perturbation(self, edge: int) -> np.ndarray:
        """The two-entry matrix holding only the given edge of R."""
        e = self.lattice.edges[edge]
        s = self.signs[edge]
        out = np.zeros_like(self.matrix)
        out[e.i, e.j] = s * e.weight
        out[e.j, e.i] = -s * e.weight
        return out


def kasteleyn_orientation(lat: DecoratedLattice) -> KasteleynMatrix:
    """Orient edges so every bounded face is odd-clockwise.

    Orientations are fixed greedily: faces with a single undecided edge pin
    that edge; a spanning tree seeds the process.  The resulting det R is
    independent of which valid orientation is produced.
    """
    n_edges = len(lat.edges)
    signs = np.zeros(n_edges, dtype=np.int8)

    # spanning tree (BFS over the deterministic edge list), oriented i -> j
    parent_seen = {0}
    frontier = [0]
    adj: dict[int, list[int]] = {i: [] for i in range(lat.n_nodes)}
    for e_idx, e in enumerate(lat.edges):
        adj[e.i].append(e_idx)
        adj[e.j].append(e_idx)
    while frontier:
        node = frontier.pop(0)
        for e_idx in adj[node]:
            e = lat.edges[e_idx]
            other = e.j if e.i == node else e.i
            if other not in parent_seen:
                parent_seen.add(other)
                signs[e_idx] = 1
                frontier.append(other)
    if len(parent_seen) != lat.n_nodes:
        raise OrientationFailure("lattice graph is disconnected")

    pending = list(_planar_faces(lat))
    while pending:
        progress = False
        rest = []
        for face in pending:
            cycle, ccw = face
            undecided = [(idx, along) for idx, along in cycle if signs[idx] == 0]
            if len(undecided) == 0:
                if _cw_count(signs, cycle, ccw) % 2 == 0:
                    raise OrientationFailure("face parity violated")
                progress = True
            elif len(undecided) == 1:
                idx, along = undecided[0]
                # either direction is legal a priori; pick the one that makes
                # the clockwise count odd
                signs[idx] = -1 if along else 1
                if _cw_count(signs, cycle, ccw) % 2 == 0:
                    signs[idx] = -signs[idx]
                progress = True
            else:
                rest.append(face)
        if not progress and rest:
            raise OrientationFailure("cannot complete face-parity orientation")
        pending = rest
    signs[signs == 0] = 1  # bridges, if any, are parity-free

    kast = KasteleynMatrix(lat, signs)
    audit_faces(kast)
    return kast


def _cw_count(signs, cycle, ccw: bool) -> int:
    """Edges of a face oriented clockwise around it.

    For a counterclockwise listing these are the edges oriented against the
    traversal; for a clockwise listing, the ones oriented along it.
    """
    against = sum(1 for idx, along in cycle
                  if signs[idx] == (-1 if along else 1))
    return against if ccw else len(cycle) - against


def audit_faces(kast: KasteleynMatrix) -> None:
    """Re-check anti-symmetry and odd-clockwise parity on every bounded face."""
    if not np.allclose(kast.matrix, -kast.matrix.T):
        raise OrientationFailure("matrix is not anti-symmetric")
    for cycle, ccw in _planar_faces(kast.lattice):
        if _cw_count(kast.signs, cycle, ccw) % 2 == 0:
            raise OrientationFailure("face parity audit failed")


def partition_dimer(kast: KasteleynMatrix) -> float:
    """log Z of the close-packed dimer model, from Z^2 = det R."""
    return 0.5 * kast.log_det()


def lattice_dump(kast: KasteleynMatrix) -> str:
    """One line per edge: 'i j weight sign', in edge-list order."""
    lines = [f"{e.i} {e.j} {e.weight:.17g} {int(s):+d}"
             for e, s in zip(kast.lattice.edges, kast.signs)]
    return "\n".join(lines)


# --- exhaustive matching oracle ----------------------------------------------

def enumerate_matchings(lat: DecoratedLattice,
                        forced_present: tuple[int, ...] = (),
                        forced_absent: tuple[int, ...] = ()) -> float:
    """Weighted perfect-matching sum by branching on the lowest open node."""
    if lat.n_nodes > MATCHING_NODE_BOUND:
        raise TooLarge(f"{lat.n_nodes} nodes exceeds {MATCHING_NODE_BOUND}")
    absent = set(forced_absent)
    adj: dict[int, list[tuple[int, float]]] = {i: [] for i in range(lat.n_nodes)}
    for e_idx, e in enumerate(lat.edges):
        if e_idx in absent or e_idx in forced_present:
            continue
        adj[e.i].append((e.j, e.weight))
        adj[e.j].append((e.i, e.weight))

    covered = [False] * lat.n_nodes
    prefactor = 1.0
    for e_idx in forced_present:
        if e_idx in absent:
            return 0.0
        e = lat.edges[e_idx]
        if covered[e.i] or covered[e.j]:
            return 0.0
        covered[e.i] = covered[e.j] = True
        prefactor *= e.weight

    def recurse(start: int) -> float:
        node = start
        while node < lat.n_nodes and covered[node]:
            node += 1
        if node == lat.n_nodes:
            return 1.0
        total = 0.0
        covered[node] = True
        for other, w in adj[node]:
            if not covered[other]:
                covered[other] = True
                total += w * recurse(node + 1)
                covered[other] = False
        covered[node] = False
        return total

    return prefactor * recurse(0)


# --- constrained partition functions -----------------------------------------

def _multilinear_ratios(kast: KasteleynMatrix, edges: list[int]) -> dict:
    """Z^cons(S occupied)/Z_0 for every subset S of the given edges.

    Works in the algebra of multilinear polynomials in the edge bump
    variables (monomials are subsets; squares are dropped, which cannot
    affect square-free coefficients): the coefficient of prod_{k in S} eps_k
    in exp(tr ln(1 + sum_k eps_k R0^-1 R_(k)) / 2) is exactly the ratio for
    the all-occupied constraint on S.
    """
    m = len(edges)
    inv = kast.inverse()
    mats = {frozenset([k]): inv @ kast.perturbation(edges[k]) for k in range(m)}

    def mat_mul(pa: dict, pb: dict) -> dict:
        out: dict = {}
        for ka, va in pa.items():
            for kb, vb in pb.items():
                if ka & kb:
                    continue
                key = ka | kb
                prod = va @ vb
                if key in out:
                    out[key] = out[key] + prod
                else:
                    out[key] = prod
        return out

    # P = (1/2) tr ln(1 + M) as a multilinear polynomial
    p: dict = {}
    power = mats
    for n in range(1, m + 1):
        coef = 0.5 * ((-1) ** (n + 1)) / n
        for key, mat in power.items():
            p[key] = p.get(key, 0.0) + coef * float(np.trace(mat))
        if n < m:
            power = mat_mul(power, mats)

    # exp(P); P has no constant term
    result = {frozenset(): 1.0}
    term = {frozenset(): 1.0}
    for j in range(1, m + 1):
        nxt: dict = {}
        for ka, va in term.items():
            for kb, vb in p.items():
                if ka & kb:
                    continue
                key = ka | kb
                nxt[key] = nxt.get(key, 0.0) + va * vb
        term = {k: v / j for k, v in nxt.items()}
        for k, v in term.items():
            result[k] = result.get(k, 0.0) + v
    return {frozenset(edges[k] for k in key): v for key, v in result.items()}


def _validated(constraints) -> tuple[list[int], list[int]]:
    if len(constraints) > CONSTRAINT_BOUND:
        raise TooManyConstraints(
            f"at most {CONSTRAINT_BOUND} simultaneous constraints")
    seen = set()
    occ, emp = [], []
    for c in constraints:
        if c.edge in seen:
            raise ConstraintConflict(f"edge {c.edge} constrained twice")
        seen.add(c.edge)
        (occ if c.occupied else emp).append(c.edge)
    return occ, emp


def constrained_ratio(kast: KasteleynMatrix, constraints) -> float:
    """Z^cons / Z_0 under the given edge occupation constraints.

    All-occupied sets come straight from the trace expansion; mixed sets are
    reduced to all-occupied ones by inclusion-exclusion over the edges
    required to be empty.
    """
    occ, emp = _validated(constraints)
    ratios = _multilinear_ratios(kast, occ + emp)
    total = 0.0
    for t in range(1 << len(emp)):
        subset = frozenset(occ) | frozenset(
            emp[b] for b in range(len(emp)) if (t >> b) & 1)
        total += ((-1) ** bin(t).count("1")) * ratios[subset]
    return total


def constrained_partition(kast: KasteleynMatrix, constraints) -> float:
    """log Z^cons (log-domain; -inf when the constraints are unsatisfiable)."""
    ratio = constrained_ratio(kast, constraints)
    if ratio <= 0.0:
        return -math.inf
    return partition_dimer(kast) + math.log(ratio)


def dimer_probability(kast: KasteleynMatrix, edge: int) -> float:
    """Occupation probability of one edge: tr(R0^-1 R_(edge)) / 2."""
    return 0.5 * float(np.trace(kast.inverse() @ kast.perturbation(edge)))


# --- vertex-state constraints ------------------------------------------------

def _incident_external_edges(lat: DecoratedLattice, site: tuple[int, int]):
    r, c = site
    if not (0 < r < lat.rows - 1 and 0 < c < lat.cols - 1):
        raise ValueError("site must be interior (all four external edges present)")
    return (lat.external_h(r, c - 1),   # W
            lat.external_h(r, c),       # E
            lat.external_v(r - 1, c),   # N
            lat.external_v(r, c))       # S


def vertex_state_constraints(lat: DecoratedLattice, site: tuple[int, int],
                             state: int) -> list[EdgeConstraint]:
    """Edge constraints pinning an interior vertex to a given state.

    A line sits on an incident edge exactly where the state's arrow opposes
    the reference ground state (state 6 on sublattice A, 5 on B).
    """
    r, c = site
    ref = 6 if sublattice(r, c) is Sublattice.A else 5
    bits = STATE_BITS[state]
    ref_bits = STATE_BITS[ref]
    edges = _incident_external_edges(lat, site)
    return [EdgeConstraint(e, bits[k] != ref_bits[k])
            for k, e in enumerate(edges)]


def vertex_constrained_ratio(kast: KasteleynMatrix, site: tuple[int, int],
                             state: int) -> float:
    """Z_site(state) / Z_0 for an interior site."""
    return constrained_ratio(
        kast, vertex_state_constraints(kast.lattice, site, state))


# --- line-configuration completion weight (mapping equivalence) --------------

_DIAMOND_MATCHINGS = ((), ((0, 1),), ((1, 2),), ((2, 3),), ((3, 0),),
                      ((0, 1), (2, 3)), ((1, 2), (3, 0)))


def line_completion_weight(lat: DecoratedLattice, lines: LineConfig) -> float:
    """Total dimer weight of all completions of a line configuration.

    External dimers are placed exactly on the occupied line edges; each city
    then sums the internal diamond matchings that cover its remaining nodes.
    """
    if lines.boundary is not Boundary.FIXED_GROUND_STATE:
        raise ValueError("line completions need the fixed ground-state boundary")
    weight = 1.0
    covered = np.zeros((lat.rows, lat.cols, 4), dtype=bool)
    for r in range(lat.rows):
        for c in range(1, lat.cols):
            if lines.h[r, c]:
                weight *= lat.weight_c
                covered[r, c - 1, 2] = covered[r, c, 0] = True
    for r in range(1, lat.rows):
        for c in range(lat.cols):
            if lines.v[r, c]:
                weight *= lat.weight_c
                covered[r - 1, c, 3] = covered[r, c, 1] = True
    for r in range(lat.rows):
        for c in range(lat.cols):
            open_nodes = frozenset(k for k in range(4) if not covered[r, c, k])
            city = 0.0
            for matching in _DIAMOND_MATCHINGS:
                nodes = frozenset(n for pair in matching for n in pair)
                if nodes == open_nodes:
                    city += lat.weight_u ** len(matching)
            weight *= city
    return weight
