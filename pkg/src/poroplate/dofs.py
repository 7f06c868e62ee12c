"""Constrained global DOF numbering.

Every field has a *raw* numbering over its full lattice (both copies of
periodic nodes, boundary nodes included).  Constraints are resolved by a
prolongation ``P`` with entries in {0, 1}: ``raw = P @ free``.  A raw DOF is
either a free master, a periodic image of one, a copy of a DOF of another
field (slaving), or identically zero.

Raw layouts
-----------
eta   3 per Q1 Biot node, ``3*node + comp``
pb    1 per Q1 Biot node
w     4 per plate node, ``4*node + k`` with k = (value, d/dx, d/dy, d2/dxdy)
pp    1 per Q1 pore node (x, y, s lattice)
u     3 per Q2 fluid node
pi    1 per Q1 fluid node (separate multiplier space)

The free vector is ordered by blocks ``eta, pb, w, pp, u``.  The velocity
fields zeta and v live in the eta and w blocks.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .mesh import MultilayerMesh, periodic_partners

BLOCKS = ("eta", "pb", "w", "pp", "u")

ZERO, SELF, SLAVE = 0, 1, 2


@dataclass(frozen=True, eq=False)
class DofLayout:
    mesh: MultilayerMesh
    raw_sizes: dict
    raw_offsets: dict
    block_sizes: dict
    block_offsets: dict
    raw_to_free: dict  # field -> global free index, -1 for zero
    periodic_map: dict  # field -> representative raw dof within the field
    essential_zeros: dict  # field -> bool mask of raw DOFs fixed to zero
    slave_map: dict  # field -> (raw dofs, target field, target raw dofs)
    P: sp.csr_matrix
    master_raw: np.ndarray  # free index -> global raw index of its master
    pi_raw_to_free: np.ndarray
    P_pi: sp.csr_matrix
    extras: dict = field(default_factory=dict)

    @property
    def n_free(self) -> int:
        return int(sum(self.block_sizes.values()))

    @property
    def n_raw(self) -> int:
        return int(sum(self.raw_sizes.values()))

    @property
    def n_pi(self) -> int:
        return self.P_pi.shape[1]

    def block(self, name: str) -> slice:
        o = self.block_offsets[name]
        return slice(o, o + self.block_sizes[name])

    def raw_block(self, name: str) -> slice:
        o = self.raw_offsets[name]
        return slice(o, o + self.raw_sizes[name])

    def expand(self, free: np.ndarray) -> dict:
        """Free Sigma vector -> dict of raw field arrays (constraints applied)."""
        raw = self.P @ np.asarray(free, dtype=float)
        return {b: raw[self.raw_block(b)] for b in BLOCKS}

    def expand_pi(self, free_pi: np.ndarray) -> np.ndarray:
        return self.P_pi @ np.asarray(free_pi, dtype=float)

    def restrict(self, raw: dict) -> np.ndarray:
        """Raw field arrays -> free vector by reading master entries.

        Slaved and image DOFs are ignored, so expanding the result overwrites
        them from their masters.
        """
        full = np.zeros(self.n_raw)
        for b in BLOCKS:
            if b in raw and raw[b] is not None:
                full[self.raw_block(b)] = raw[b]
        return full[self.master_raw]

    def restrict_pi(self, raw_pi: np.ndarray) -> np.ndarray:
        idx = np.flatnonzero(self.pi_raw_to_free >= 0)
        out = np.zeros(self.n_pi)
        out[self.pi_raw_to_free[idx]] = np.asarray(raw_pi)[idx]
        return out

    def zeros(self) -> np.ndarray:
        return np.zeros(self.n_free)

    def block_vector(self, parts: dict) -> np.ndarray:
        out = self.zeros()
        for b, v in parts.items():
            out[self.block(b)] = v
        return out


def build_dof_layout(mesh: MultilayerMesh) -> DofLayout:
    """Number DOFs with periodicity, clamping and trace slaving resolved."""
    n = mesh.n_plane
    biot, fluid, plate, pore = mesh.biot, mesh.fluid, mesh.plate, mesh.pore

    # Biot lattice indices
    bs = biot.lattice_shape(1)
    bi, bj, bk = np.indices(bs[::-1]).reshape(3, -1)[::-1]
    brep = periodic_partners(biot, 1)
    plate_node = plate.node_index([bi, bj])
    pore_top = pore.node_index([bi, bj, np.full_like(bi, mesh.ns_p)])

    # eta: zero on top, in-plane components zero on the interface, vertical
    # component copied from the plate value DOF
    nb = brep.size
    kind = np.full((nb, 3), SELF)
    kind[bk == mesh.nz_b] = ZERO
    kind[bk == 0, :2] = ZERO
    kind[bk == 0, 2] = SLAVE
    target = brep[:, None] * 3 + np.arange(3)
    target[bk == 0, 2] = plate_node[bk == 0] * 4
    eta = dict(kind=kind.ravel(), target=target.ravel(), slave_field="w")

    kind = np.full(nb, SELF)
    kind[bk == mesh.nz_b] = ZERO
    kind[bk == 0] = SLAVE
    target = brep.copy()
    target[bk == 0] = pore_top[bk == 0]
    pb = dict(kind=kind, target=target, slave_field="pp")

    ps = plate.lattice_shape(1)
    pi_, pj_ = np.indices(ps[::-1]).reshape(2, -1)[::-1]
    on_edge = (pi_ == 0) | (pi_ == n) | (pj_ == 0) | (pj_ == n)
    kind = np.repeat(np.where(on_edge, ZERO, SELF), 4)
    w = dict(kind=kind, target=np.arange(kind.size), slave_field=None)

    prep = periodic_partners(pore, 1)
    pp = dict(kind=np.full(prep.size, SELF), target=prep, slave_field=None)

    fs2 = fluid.lattice_shape(2)
    fk2 = np.indices(fs2[::-1]).reshape(3, -1)[::-1][2]
    frep2 = periodic_partners(fluid, 2)
    kind = np.repeat(np.where(fk2 == 0, ZERO, SELF), 3)
    u = dict(kind=kind, target=(frep2[:, None] * 3 + np.arange(3)).ravel(), slave_field=None)

    fields = {"eta": eta, "pb": pb, "w": w, "pp": pp, "u": u}

    raw_sizes = {b: fields[b]["kind"].size for b in BLOCKS}
    raw_offsets, o = {}, 0
    for b in BLOCKS:
        raw_offsets[b] = o
        o += raw_sizes[b]

    # masters and block-local numbering
    local = {}
    block_sizes = {}
    masters = []
    for b in BLOCKS:
        f = fields[b]
        is_master = (f["kind"] == SELF) & (f["target"] == np.arange(f["kind"].size))
        loc = np.full(f["kind"].size, -1)
        loc[is_master] = np.arange(int(is_master.sum()))
        local[b] = loc
        block_sizes[b] = int(is_master.sum())
        masters.append(raw_offsets[b] + np.flatnonzero(is_master))
    block_offsets, o = {}, 0
    for b in BLOCKS:
        block_offsets[b] = o
        o += block_sizes[b]

    def own(b):
        f = fields[b]
        g = np.full(f["kind"].size, -1)
        m = f["kind"] == SELF
        g[m] = local[b][f["target"][m]] + block_offsets[b]
        return g

    raw_to_free = {b: own(b) for b in BLOCKS}
    for b in BLOCKS:
        f = fields[b]
        m = f["kind"] == SLAVE
        if m.any():
            raw_to_free[b][m] = raw_to_free[f["slave_field"]][f["target"][m]]

    rows, cols = [], []
    for b in BLOCKS:
        g = raw_to_free[b]
        nz = np.flatnonzero(g >= 0)
        rows.append(raw_offsets[b] + nz)
        cols.append(g[nz])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    n_raw = sum(raw_sizes.values())
    n_free = sum(block_sizes.values())
    P = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n_raw, n_free))

    frep1 = periodic_partners(fluid, 1)
    pi_master = frep1 == np.arange(frep1.size)
    pi_loc = np.full(frep1.size, -1)
    pi_loc[pi_master] = np.arange(int(pi_master.sum()))
    pi_map = pi_loc[frep1]
    P_pi = sp.csr_matrix(
        (np.ones(frep1.size), (np.arange(frep1.size), pi_map)),
        shape=(frep1.size, int(pi_master.sum())),
    )

    periodic_map = {b: np.where(fields[b]["kind"] == SELF, fields[b]["target"], -1) for b in BLOCKS}
    periodic_map["pi"] = frep1
    essential = {b: fields[b]["kind"] == ZERO for b in BLOCKS}
    slave_map = {}
    for b in ("eta", "pb"):
        m = np.flatnonzero(fields[b]["kind"] == SLAVE)
        slave_map[b] = (m, fields[b]["slave_field"], fields[b]["target"][m])

    return DofLayout(
        mesh=mesh,
        raw_sizes=raw_sizes,
        raw_offsets=raw_offsets,
        block_sizes=block_sizes,
        block_offsets=block_offsets,
        raw_to_free=raw_to_free,
        periodic_map=periodic_map,
        essential_zeros=essential,
        slave_map=slave_map,
        P=P,
        master_raw=np.concatenate(masters),
        pi_raw_to_free=pi_map,
        P_pi=P_pi,
    )
