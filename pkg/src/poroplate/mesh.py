"""Structured four-layer mesh sharing one in-plane lattice.

Layers
------
``biot``   (0,1)^2 x (0,1), hexahedra; top face z=1 is the outer Biot boundary
``fluid``  (0,1)^2 x (-1,0), hexahedra; bottom face z=-1 is the no-slip wall
``plate``  (0,1)^2 mid-surface at z=0, rectangles
``pore``   (0,1)^2 x (-h/2,h/2) in (x, y, s), hexahedra; s=+h/2 touches the
           Biot layer, s=-h/2 touches the fluid

Cells and lattice nodes are numbered with x fastest, then y, then the
vertical axis.  Lattices keep both copies of periodic nodes; periodicity is
resolved by the DOF layout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .elements import QuadRule, tensor_rule


@dataclass(frozen=True)
class Layer:
    """A box split into ``shape`` equal cells."""

    name: str
    origin: tuple
    size: tuple
    shape: tuple

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def extents(self) -> np.ndarray:
        return np.array(self.size, dtype=float) / np.array(self.shape)

    @property
    def ncells(self) -> int:
        return int(np.prod(self.shape))

    def lattice_shape(self, order: int = 1) -> tuple:
        return tuple(order * n + 1 for n in self.shape)

    def node_coords(self, order: int = 1) -> np.ndarray:
        """(nnodes, dim) coordinates of the order-``order`` Lagrange lattice."""
        axes = [
            o + s * np.arange(m) / (m - 1)
            for o, s, m in zip(self.origin, self.size, self.lattice_shape(order))
        ]
        grids = np.meshgrid(*axes[::-1], indexing="ij")
        return np.stack([g.ravel() for g in grids[::-1]], axis=1)

    def node_index(self, ijk, order: int = 1) -> np.ndarray:
        ls = self.lattice_shape(order)
        idx = np.zeros_like(np.asarray(ijk[0]))
        for d in reversed(range(self.dim)):
            idx = idx * ls[d] + np.asarray(ijk[d])
        return idx

    def cell_ijk(self) -> np.ndarray:
        """(dim, ncells) integer cell coordinates."""
        return np.indices(self.shape[::-1]).reshape(self.dim, -1)[::-1]

    def cell_origins(self) -> np.ndarray:
        return np.asarray(self.origin) + self.cell_ijk().T * self.extents

    def cell_nodes(self, order: int = 1) -> np.ndarray:
        """(ncells, (order+1)^dim) lattice node indices in reference order."""
        cells = self.cell_ijk()
        local = np.indices((order + 1,) * self.dim).reshape(self.dim, -1)[::-1]
        ijk = [order * cells[d][:, None] + local[d][None, :] for d in range(self.dim)]
        return self.node_index(ijk, order)


@dataclass(frozen=True)
class InterfacePatch:
    """One plate cell and the faces stacked above and below it."""

    plate_cell: int
    fluid_cell: int
    biot_cell: int
    pore_top_cell: int
    pore_bottom_cell: int
    points: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class MultilayerMesh:
    n_plane: int
    nz_b: int
    nz_f: int
    ns_p: int
    h_p: float = 0.2
    layers: dict = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        for name in ("n_plane", "nz_b", "nz_f", "ns_p"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v}")
        if not self.h_p > 0:
            raise ValueError(f"h_p must be positive, got {self.h_p}")
        n, h = self.n_plane, float(self.h_p)
        layers = {
            "biot": Layer("biot", (0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (n, n, self.nz_b)),
            "fluid": Layer("fluid", (0.0, 0.0, -1.0), (1.0, 1.0, 1.0), (n, n, self.nz_f)),
            "plate": Layer("plate", (0.0, 0.0), (1.0, 1.0), (n, n)),
            "pore": Layer("pore", (0.0, 0.0, -h / 2), (1.0, 1.0, h), (n, n, self.ns_p)),
        }
        object.__setattr__(self, "layers", layers)

    def __hash__(self):
        return hash((self.n_plane, self.nz_b, self.nz_f, self.ns_p, float(self.h_p)))

    @property
    def biot(self) -> Layer:
        return self.layers["biot"]

    @property
    def fluid(self) -> Layer:
        return self.layers["fluid"]

    @property
    def plate(self) -> Layer:
        return self.layers["plate"]

    @property
    def pore(self) -> Layer:
        return self.layers["pore"]

    @cached_property
    def interface_cells(self) -> dict:
        """Plate cell -> adjacent cell in every other layer (arrays indexed by plate cell)."""
        n = self.n_plane
        c = np.arange(n * n)
        return {
            "fluid": c + n * n * (self.nz_f - 1),
            "biot": c.copy(),
            "pore_top": c + n * n * (self.ns_p - 1),
            "pore_bottom": c.copy(),
        }


def build_mesh(n_plane: int, nz_b: int, nz_f: int, ns_p: int, h_p: float = 0.2) -> MultilayerMesh:
    """Build the structured multilayer mesh; rejects nonpositive sizes."""
    return MultilayerMesh(n_plane, nz_b, nz_f, ns_p, float(h_p))


INTERFACE_RULE: QuadRule = tensor_rule((4, 4))


def interface_quadrature_cells(mesh: MultilayerMesh) -> list[InterfacePatch]:
    """Quadrature patches on the mid-surface, one per plate cell."""
    plate = mesh.plate
    ext = plate.extents
    area = float(np.prod(ext))
    ic = mesh.interface_cells
    out = []
    for c, org in enumerate(plate.cell_origins()):
        out.append(
            InterfacePatch(
                plate_cell=c,
                fluid_cell=int(ic["fluid"][c]),
                biot_cell=int(ic["biot"][c]),
                pore_top_cell=int(ic["pore_top"][c]),
                pore_bottom_cell=int(ic["pore_bottom"][c]),
                points=org + INTERFACE_RULE.points * ext,
                weights=INTERFACE_RULE.weights * area,
            )
        )
    return out


def periodic_partners(layer: Layer, order: int = 1) -> np.ndarray:
    """Map each lattice node to its representative after in-plane wraparound."""
    ls = layer.lattice_shape(order)
    ijk = np.indices(ls[::-1]).reshape(layer.dim, -1)[::-1]
    wrapped = [ijk[0] % (ls[0] - 1), ijk[1] % (ls[1] - 1)] + [ijk[d] for d in range(2, layer.dim)]
    return layer.node_index(wrapped, order)
