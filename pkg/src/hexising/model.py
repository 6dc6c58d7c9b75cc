"""Spin configurations, coupling fields, and local energetics.

The energy of a configuration is minus the sum of J_xy * s_x * s_y over
nearest-neighbor pairs minus h times the sum of spins; flipping site x
changes it by

    delta_H(x) = 2 * sum_{y ~ x} J_xy * s_x * s_y + 2 * h * s_x

and a site flips (when attempted) exactly when this is strictly negative.
Ties (delta_H == 0, detected at |delta_H| < 1e-12) cannot occur for the
homogeneous zero-field model on full-degree sites (odd neighbor count) and
have probability zero under continuous couplings; where they are reachable
at all (free-boundary sites of degree < 3, homogeneous h = 0) a tied site
simply does not flip.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import TieError, CorrectnessError
from .lattice import HexLattice, Site, build_lattice

HOMOGENEOUS = "homogeneous"
DISORDERED = "disordered_uniform"

TIE_TOL = 1e-12  # on delta_H


@dataclass
class SpinConfig:
    """A +-1 assignment to every site of a lattice."""

    lattice: HexLattice
    spins: np.ndarray  # int8, shape (n_sites,)

    def __post_init__(self):
        self.spins = np.asarray(self.spins, dtype=np.int8)
        if self.spins.shape != (self.lattice.n_sites,):
            raise ValueError("spin array does not match lattice size")
        if not np.isin(self.spins, (-1, 1)).all():
            raise ValueError("spins must be +-1")

    def copy(self) -> "SpinConfig":
        return SpinConfig(self.lattice, self.spins.copy())

    def spin(self, x: "Site | int") -> int:
        return int(self.spins[self.lattice.index(x)])

    def plus_fraction(self) -> float:
        return float((self.spins > 0).mean())


@dataclass
class CouplingField:
    """Per-edge couplings plus a uniform external field.

    ``j_slot[i, k]`` duplicates the coupling of site i's k-th edge for O(1)
    access in the engines (0.0 where the neighbor is missing); ``bfield``
    holds the frozen-exterior contribution sum_ghost J * s_ghost for
    fixed_plus / fixed_minus boundaries and is zero otherwise.
    """

    lattice: HexLattice
    kind: str
    h: float
    j_edges: np.ndarray                  # float64 (n canonical edges incl. ghosts,)
    bfield: np.ndarray = field(default=None)  # float64 (n_sites,)

    def __post_init__(self):
        if self.kind not in (HOMOGENEOUS, DISORDERED):
            raise ValueError(f"unknown coupling kind {self.kind!r}")
        lat = self.lattice
        if self.bfield is None:
            self.bfield = np.zeros(lat.n_sites)
            if lat.boundary in ("fixed_plus", "fixed_minus"):
                ghost_spin = 1.0 if lat.boundary == "fixed_plus" else -1.0
                for x in range(lat.n_sites):
                    for k in range(3):
                        if lat.neighbors[x, k] < 0:
                            eid = lat.edge_of_slot[x, k]
                            self.bfield[x] += ghost_spin * self.j_edges[eid]
        self.j_slot = np.zeros((lat.n_sites, 3))
        present = lat.neighbors >= 0
        self.j_slot[present] = self.j_edges[lat.edge_of_slot[present]]

    def edge_coupling(self, x: "Site | int", y: "Site | int") -> float:
        lat = self.lattice
        i, j = lat.index(x), lat.index(y)
        for k in range(3):
            if lat.neighbors[i, k] == j:
                return float(self.j_edges[lat.edge_of_slot[i, k]])
        raise ValueError("sites are not hex-adjacent")


def sample_initial(lat: HexLattice, plus_density: float, rng: np.random.Generator) -> SpinConfig:
    """I.i.d. spins, +1 with the given density."""
    if not 0.0 <= plus_density <= 1.0:
        raise ValueError("plus density must lie in [0, 1]")
    spins = np.where(rng.random(lat.n_sites) < plus_density, 1, -1).astype(np.int8)
    return SpinConfig(lat, spins)


def sample_couplings(lat: HexLattice, kind: str, h: float, rng: np.random.Generator | None = None) -> CouplingField:
    """All-ones couplings, or i.i.d. Uniform(0, 1) ones (endpoints excluded)."""
    if h < 0:
        raise ValueError("field h must be nonnegative")
    n = len(lat.edges)
    if kind == HOMOGENEOUS:
        j = np.ones(n)
    elif kind == DISORDERED:
        if rng is None:
            raise ValueError("disordered couplings need a random stream")
        j = rng.random(n)
        # the invariant wants the open interval; resample boundary values
        bad = (j <= 0.0) | (j >= 1.0)
        while bad.any():
            j[bad] = rng.random(int(bad.sum()))
            bad = (j <= 0.0) | (j >= 1.0)
    else:
        raise ValueError(f"unknown coupling kind {kind!r}")
    return CouplingField(lat, kind, float(h), j)


def local_field(cfg: SpinConfig, cpl: CouplingField, i: int) -> float:
    """sum_{y ~ i} J * s_y + bfield_i + h   (so delta_H = 2 * s_i * field)."""
    lat = cfg.lattice
    acc = cpl.bfield[i] + cpl.h
    for k in range(3):
        y = lat.neighbors[i, k]
        if y >= 0:
            acc += cpl.j_slot[i, k] * cfg.spins[y]
    return float(acc)


def all_local_fields(cfg: SpinConfig, cpl: CouplingField) -> np.ndarray:
    """Vectorized local_field over all sites."""
    lat = cfg.lattice
    padded = np.append(cfg.spins, np.int8(0))      # index -1 hits the 0 pad
    nb = np.where(lat.neighbors >= 0, lat.neighbors, lat.n_sites)
    return (cpl.j_slot * padded[nb]).sum(axis=1) + cpl.bfield + cpl.h


def delta_H(cfg: SpinConfig, cpl: CouplingField, x: "Site | int") -> float:
    """Energy change of flipping x, evaluated over present neighbors."""
    i = cfg.lattice.index(x)
    return 2.0 * cfg.spins[i] * local_field(cfg, cpl, i)


def _tie_is_fatal(cpl: CouplingField, degree: int) -> bool:
    # free-boundary sub-degree sites can tie legitimately in the
    # homogeneous zero-field model; everywhere else a tie is a bug
    return not (cpl.kind == HOMOGENEOUS and cpl.h == 0.0 and degree < 3
                and cpl.lattice.boundary == "open")


def is_unstable(cfg: SpinConfig, cpl: CouplingField, x: "Site | int") -> bool:
    """True iff flipping x strictly lowers the energy."""
    i = cfg.lattice.index(x)
    d = delta_H(cfg, cpl, i)
    if abs(d) < TIE_TOL:
        if _tie_is_fatal(cpl, int(cfg.lattice.degrees[i])):
            raise TieError(f"zero energy change at site {cfg.lattice.site(i)}")
        return False
    return d < 0.0


def internal_energy(cfg: SpinConfig, cpl: CouplingField, subset) -> float:
    """Minus the coupling-weighted spin agreement over edges inside a subset.

    Each internal edge is counted once; the subset must be hex-connected.
    """
    lat = cfg.lattice
    idxs = np.asarray(sorted({lat.index(x) for x in subset}), dtype=np.int64)
    if len(idxs) == 0:
        raise ValueError("empty subset")
    member = np.zeros(lat.n_sites, dtype=bool)
    member[idxs] = True
    # connectivity check (BFS inside the subset)
    seen = {int(idxs[0])}
    frontier = [int(idxs[0])]
    while frontier:
        nxt = []
        for i in frontier:
            for j in lat.neighbors[i]:
                if j >= 0 and member[j] and j not in seen:
                    seen.add(int(j))
                    nxt.append(int(j))
        frontier = nxt
    if len(seen) != len(idxs):
        raise ValueError("subset is not hex-connected")
    a, b = lat.edges[:, 0], lat.edges[:, 1]
    real = (a >= 0) & (b >= 0)
    inside = real & member[np.clip(a, 0, None)] & member[np.clip(b, 0, None)]
    s = cfg.spins
    return float(-(cpl.j_edges[inside] * s[a[inside]] * s[b[inside]]).sum())


def subset_energy_deltas(cfg: SpinConfig, cpl: CouplingField, subset) -> "SubsetEnergyTracker":
    return SubsetEnergyTracker(cfg, cpl, subset)


class SubsetEnergyTracker:
    """Incrementally tracks the internal energy of a fixed subset along a run."""

    def __init__(self, cfg: SpinConfig, cpl: CouplingField, subset):
        lat = cfg.lattice
        self.lattice = lat
        idxs = {lat.index(x) for x in subset}
        self.member = np.zeros(lat.n_sites, dtype=bool)
        self.member[list(idxs)] = True
        self.spins = cfg.spins.copy()
        self.j_slot = cpl.j_slot
        self.energy = internal_energy(cfg, cpl, idxs)

    def apply_flip(self, i: int) -> float:
        """Flip site i in the tracked state; return the energy change (0 if outside)."""
        lat = self.lattice
        old = self.spins[i]
        self.spins[i] = -old
        if not self.member[i]:
            return 0.0
        delta = 0.0
        for k in range(3):
            j = lat.neighbors[i, k]
            if j >= 0 and self.member[j]:
                delta += 2.0 * self.j_slot[i, k] * old * self.spins[j]
        self.energy += delta
        return delta


# -- plain-text snapshots (one line per site: "u v s spin") ------------------

def save_config(cfg: SpinConfig, path, *, kind: str = HOMOGENEOUS, h: float = 0.0, seed: int | None = None):
    lat = cfg.lattice
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"L={lat.L} boundary={lat.boundary} kind={kind} h={h:.12g} seed={'' if seed is None else seed}\n")
        for i in range(lat.n_sites):
            st = lat.site(i)
            fh.write(f"{st.u} {st.v} {st.s} {int(cfg.spins[i]):+d}\n")


def load_config(path) -> tuple[SpinConfig, dict]:
    with open(path, encoding="utf-8") as fh:
        header = dict(kv.split("=", 1) for kv in fh.readline().split())
        lat = build_lattice(int(header["L"]), header["boundary"])
        spins = np.zeros(lat.n_sites, dtype=np.int8)
        for line in fh:
            u, v, s, sp = line.split()
            spins[lat.index(Site(int(u), int(v), s))] = int(sp)
    meta = {"kind": header.get("kind", HOMOGENEOUS), "h": float(header.get("h", 0.0) or 0.0),
            "seed": None if header.get("seed", "") == "" else int(header["seed"])}
    return SpinConfig(lat, spins), meta
