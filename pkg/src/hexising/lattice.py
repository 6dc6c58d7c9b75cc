"""Honeycomb lattice geometry on a finite torus or box.

Sites carry unit-cell coordinates (u, v) and a sublattice tag: each unit
cell holds one site of sublattice A and one of B, and the flat index is
``(v * L + u) * 2 + s`` with s = 0 for A, 1 for B.

Coordinate convention (the only arbitrary choice in the geometry): the hex
neighbors of (u, v, A) are (u, v, B), (u-1, v, B) and (u, v-1, B); the
neighbors of (u, v, B) are the inverse images (u, v, A), (u+1, v, A),
(u, v+1, A).  Coordinates wrap mod L on the torus and out-of-box neighbors
are dropped on open boundaries.

The module also precomputes the structures the rest of the package needs:

* the triangular sublattice adjacency (same-sublattice sites two hex steps
  apart) together with the unique common hex neighbor of each such pair,
* the cells (minimal hexagons; every torus site lies in exactly three),
* canonical edge lists with unit-cell displacement vectors, used for
  torus-wrapping detection by the cluster analyzers.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

A, B = "A", "B"
BOUNDARIES = ("torus", "open", "fixed_plus", "fixed_minus")

# Unit-cell displacement of slot k of an A-site to its B neighbor; B slots
# are the negatives.
_A_SLOT_SHIFT = ((0, 0), (-1, 0), (0, -1))


@dataclass(frozen=True, order=True)
class Site:
    """One lattice site: unit cell (u, v) plus sublattice tag."""

    u: int
    v: int
    s: str

    def __post_init__(self):
        if self.s not in (A, B):
            raise ValueError(f"sublattice tag must be 'A' or 'B', got {self.s!r}")


@dataclass(frozen=True)
class Cell:
    """A minimal hexagon of six sites, in cycle order (alternating A, B)."""

    sites: tuple[Site, ...]


class HexLattice:
    """Finite honeycomb lattice with precomputed adjacency tables.

    Immutable after construction (lazy tables are write-once caches); safe
    to share read-only across replicas.
    """

    def __init__(self, L: int, boundary: str = "torus"):
        if boundary not in BOUNDARIES:
            raise ValueError(f"unknown boundary {boundary!r}; expected one of {BOUNDARIES}")
        if L <= 0:
            raise ValueError("L must be positive")
        if boundary == "torus" and L < 2:
            raise ValueError("torus needs L >= 2 (L = 1 would create multi-edges)")
        self.L = int(L)
        self.boundary = boundary
        self.n_sites = 2 * L * L
        self._build_hex()
        self._build_edges()
        self._build_cells()

    # -- construction ------------------------------------------------------

    def _wrap_or_drop(self, uu: np.ndarray, vv: np.ndarray) -> np.ndarray:
        """Map cell coordinates to cell index; -1 where outside an open box."""
        L = self.L
        if self.is_torus:
            return (vv % L) * L + (uu % L)
        inside = (uu >= 0) & (uu < L) & (vv >= 0) & (vv < L)
        return np.where(inside, vv * L + uu, -1)

    def _build_hex(self):
        L = self.L
        uu, vv = np.meshgrid(np.arange(L), np.arange(L), indexing="xy")
        uu, vv = uu.ravel(), vv.ravel()  # cell index c = v*L + u
        nbrs = np.full((self.n_sites, 3), -1, dtype=np.int32)
        for k, (du, dv) in enumerate(_A_SLOT_SHIFT):
            c = self._wrap_or_drop(uu + du, vv + dv)
            nbrs[0::2, k] = np.where(c >= 0, 2 * c + 1, -1)   # A -> B
            c = self._wrap_or_drop(uu - du, vv - dv)
            nbrs[1::2, k] = np.where(c >= 0, 2 * c, -1)       # B -> A
        self.neighbors = nbrs
        self.degrees = (nbrs >= 0).sum(axis=1).astype(np.int8)

    def _build_edges(self):
        """Canonical hex edge list.

        Every edge is keyed by (A endpoint, slot k).  For open-family
        boundaries, slots whose other endpoint falls outside the box get a
        ghost edge (endpoint -1): unused with free boundaries, but carrying
        a coupling against the frozen exterior spin for fixed_plus/minus.
        """
        edges = []
        offsets = []
        edge_of_slot = np.full((self.n_sites, 3), -1, dtype=np.int32)
        for x in range(0, self.n_sites, 2):          # A sites
            for k in range(3):
                y = self.neighbors[x, k]
                eid = len(edges)
                edges.append((x, y))
                offsets.append(_A_SLOT_SHIFT[k])
                edge_of_slot[x, k] = eid
                if y >= 0:
                    edge_of_slot[y, k] = eid          # slot indices pair up
        for x in range(1, self.n_sites, 2):          # B sites: ghost A ends
            for k in range(3):
                if self.neighbors[x, k] < 0:
                    eid = len(edges)
                    edges.append((-1, x))
                    offsets.append(tuple(-d for d in _A_SLOT_SHIFT[k]))
                    edge_of_slot[x, k] = eid
        self.edges = np.asarray(edges, dtype=np.int32)
        self.edge_offsets = np.asarray(offsets, dtype=np.int32)
        self.edge_of_slot = edge_of_slot
        self.n_edges = int((self.edges >= 0).all(axis=1).sum())

    def _build_cells(self):
        """Cells via the face construction; only complete faces on open boxes."""
        L = self.L
        faces = []
        site_cells: list[list[int]] = [[] for _ in range(self.n_sites)]
        for v in range(L):
            for u in range(L):
                ring = [(u, v, 0), (u, v, 1), (u + 1, v, 0),
                        (u + 1, v - 1, 1), (u + 1, v - 1, 0), (u, v - 1, 1)]
                idxs = []
                for (cu, cv, s) in ring:
                    c = self._wrap_or_drop(np.asarray([cu]), np.asarray([cv]))[0]
                    idxs.append(-1 if c < 0 else 2 * c + s)
                if min(idxs) < 0:
                    continue
                fid = len(faces)
                faces.append(idxs)
                for i in idxs:
                    site_cells[i].append(fid)
        self.cell_sites = np.asarray(faces, dtype=np.int32) if faces else np.empty((0, 6), np.int32)
        self.n_cells = len(faces)
        width = max((len(c) for c in site_cells), default=0)
        sc = np.full((self.n_sites, max(width, 1)), -1, dtype=np.int32)
        for i, cs in enumerate(site_cells):
            sc[i, :len(cs)] = cs
        self.site_cells = sc
        # sanity: faces really are hex cycles
        for row in self.cell_sites:
            for i in range(6):
                a, b = row[i], row[(i + 1) % 6]
                assert b in self.neighbors[a], "cell construction broke hex adjacency"

    @cached_property
    def _tri_tables(self):
        """Triangular adjacency and the common-hex-neighbor map.

        tri[x, j] lists same-sublattice sites two hex steps from x and
        zeta[x, j] the unique shared hex neighbor of the pair.  Requires
        L >= 3 on the torus: at L = 2 the pairs share two hex neighbors.
        """
        if self.is_torus and self.L < 3:
            raise ValueError("triangular adjacency requires torus L >= 3 (L = 2 doubles tri-edges)")
        tri = np.full((self.n_sites, 6), -1, dtype=np.int32)
        zeta = np.full((self.n_sites, 6), -1, dtype=np.int32)
        tri_edges = []
        tri_offsets = []
        for x in range(self.n_sites):
            seen: dict[int, int] = {}
            for m in self.neighbors[x]:
                if m < 0:
                    continue
                for y in self.neighbors[m]:
                    if y < 0 or y == x:
                        continue
                    if y in seen:
                        raise ValueError("non-unique common hex neighbor; lattice too small")
                    seen[y] = m
            for j, y in enumerate(sorted(seen)):
                tri[x, j] = y
                zeta[x, j] = seen[y]
                if y > x:
                    tri_edges.append((x, y))
                    du = self._cell_delta(x, y)
                    tri_offsets.append(du)
        return tri, zeta, np.asarray(tri_edges, np.int32), np.asarray(tri_offsets, np.int32)

    def _cell_delta(self, x: int, y: int) -> tuple[int, int]:
        """Geometric unit-cell displacement x -> y for tri-adjacent pairs."""
        L = self.L
        (ux, vx), (uy, vy) = self._cell_of(x), self._cell_of(y)
        du, dv = uy - ux, vy - vx
        if self.is_torus:
            du = (du + L // 2) % L - L // 2
            dv = (dv + L // 2) % L - L // 2
        return (du, dv)

    # -- indexing ----------------------------------------------------------

    @property
    def is_torus(self) -> bool:
        return self.boundary == "torus"

    def _cell_of(self, idx: int) -> tuple[int, int]:
        c = idx // 2
        return (c % self.L, c // self.L)

    def index(self, site: "Site | int") -> int:
        """Flat index of a site (identity on already-flat indices)."""
        if isinstance(site, (int, np.integer)):
            idx = int(site)
            if not 0 <= idx < self.n_sites:
                raise ValueError(f"site index {idx} out of range")
            return idx
        u, v = site.u, site.v
        if self.is_torus:
            u, v = u % self.L, v % self.L
        if not (0 <= u < self.L and 0 <= v < self.L):
            raise ValueError(f"{site} outside the {self.L}x{self.L} box")
        return (v * self.L + u) * 2 + (0 if site.s == A else 1)

    def site(self, idx: int) -> Site:
        u, v = self._cell_of(idx)
        return Site(u, v, A if idx % 2 == 0 else B)

    @property
    def origin(self) -> Site:
        """The distinguished site watched by the decay estimators (a B-site)."""
        return Site(0, 0, B)

    def sites(self):
        return [self.site(i) for i in range(self.n_sites)]

    # -- queries -----------------------------------------------------------

    def hex_neighbors(self, x: "Site | int") -> list[Site]:
        i = self.index(x)
        return [self.site(int(j)) for j in self.neighbors[i] if j >= 0]

    def tri_neighbors(self, x: "Site | int") -> list[Site]:
        tri, _, _, _ = self._tri_tables
        i = self.index(x)
        return [self.site(int(j)) for j in tri[i] if j >= 0]

    def zeta(self, y1: "Site | int", y2: "Site | int") -> Site:
        """The unique common hex neighbor of a tri-adjacent same-sublattice pair."""
        tri, zeta, _, _ = self._tri_tables
        i, j = self.index(y1), self.index(y2)
        hits = np.where(tri[i] == j)[0]
        if len(hits) == 0:
            raise ValueError("sites are not tri-adjacent")
        return self.site(int(zeta[i, hits[0]]))

    def cells_of(self, x: "Site | int") -> list[Cell]:
        i = self.index(x)
        out = []
        for fid in self.site_cells[i]:
            if fid >= 0:
                out.append(Cell(tuple(self.site(int(j)) for j in self.cell_sites[fid])))
        return out

    def cell_neighborhood(self, x: "Site | int") -> np.ndarray:
        """Sorted indices of the union of the cells through x (13 sites on a torus)."""
        i = self.index(x)
        ids = [fid for fid in self.site_cells[i] if fid >= 0]
        return np.unique(self.cell_sites[ids].ravel())

    # convenience views used by the engines ---------------------------------

    @cached_property
    def tri_edge_list(self) -> tuple[np.ndarray, np.ndarray]:
        """Canonical tri edges (Et, 2) and their unit-cell offsets (Et, 2)."""
        _, _, edges, offsets = self._tri_tables
        return edges, offsets

    @cached_property
    def tri_neighbor_array(self) -> np.ndarray:
        return self._tri_tables[0]

    @cached_property
    def zeta_array(self) -> np.ndarray:
        return self._tri_tables[1]

    @cached_property
    def sub_b_mask(self) -> np.ndarray:
        m = np.zeros(self.n_sites, dtype=bool)
        m[1::2] = True
        return m

    def __repr__(self):
        return f"HexLattice(L={self.L}, boundary={self.boundary!r})"


def build_lattice(L: int, boundary: str = "torus") -> HexLattice:
    """Build an L x L honeycomb lattice with the given boundary."""
    return HexLattice(L, boundary)
