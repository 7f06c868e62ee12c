"""Initial-condition catalog: zero, seeded random, and Fourier modes.

Every constructor returns an X-consistent state: slaved DOFs come from their
masters (states are stored as free coefficients) and the fluid velocity is
projected onto the discretely divergence-free subspace.
"""
from __future__ import annotations

import numpy as np

from .evolution import FIELD_BLOCK, StateVector
from .forms import Operators
from .saddle import SaddleFactor

CATALOG = ("zero", "random", "fourier")


def project_divergence_free(ops: Operators, u: np.ndarray) -> np.ndarray:
    """Mass-orthogonal projection of a free u block onto ker B."""
    L = ops.layout
    sl = L.block("u")
    Mu = ops.raw["u_mass"]
    Pu = L.P[L.raw_block("u"), sl]
    Muf = (Pu.T @ Mu @ Pu).tocsr()
    Bu = ops.B[:, sl]
    sol = SaddleFactor(Muf, Bu).solve(Muf @ u)
    return sol.phi


def zero_state(ops: Operators) -> StateVector:
    return StateVector.zeros(ops.layout)


def random_state(ops: Operators, seed: int = 0, amplitude: float = 1.0, fields=None) -> StateVector:
    """Seeded standard-normal free coefficients times ``amplitude``."""
    rng = np.random.default_rng(seed)
    L = ops.layout
    fields = tuple(FIELD_BLOCK) if fields is None else tuple(fields)
    kw = {}
    for f, b in FIELD_BLOCK.items():
        x = rng.standard_normal(L.block_sizes[b]) * amplitude
        kw[f] = x if f in fields else np.zeros_like(x)
    kw["u"] = project_divergence_free(ops, kw["u"])
    return StateVector(pi=np.zeros(L.n_pi), **kw)


def _envelope(field: str, z):
    # vanishes where the field carries an essential condition
    if field in ("eta", "zeta", "pb"):
        return np.sin(np.pi * z)  # zero on z=0 (overwritten anyway) and z=1
    if field == "u":
        return np.sin(0.5 * np.pi * (z + 1.0))  # zero on the bottom wall
    return np.ones_like(z)


def fourier_state(ops: Operators, modes: dict) -> StateVector:
    """Per-field Fourier modes.

    ``modes`` maps a field name to ``{"k": int, "amplitude": float}``.  Scalar
    bulk fields get ``a cos(2 pi k x) cos(2 pi k y) * envelope(z)``; vector
    fields put that profile in every component; plate fields use the clamped
    profile ``a sin^2(pi k x) sin^2(pi k y)`` with exact Hermite nodal data.
    """
    L = ops.layout
    m = ops.mesh
    raw = {}
    unknown = set(modes) - set(FIELD_BLOCK)
    if unknown:
        raise ValueError(f"unknown fields in Fourier catalog: {sorted(unknown)}")
    for f, spec in modes.items():
        k = int(spec.get("k", 1))
        a = float(spec.get("amplitude", 1.0))
        if f in ("w", "v"):
            raw[f] = a * plate_sin2(m, k)
            continue
        layer, order, ncomp = {"eta": ("biot", 1, 3), "zeta": ("biot", 1, 3), "pb": ("biot", 1, 1),
                               "pp": ("pore", 1, 1), "u": ("fluid", 2, 3)}[f]
        X = m.layers[layer].node_coords(order)
        prof = a * np.cos(2 * np.pi * k * X[:, 0]) * np.cos(2 * np.pi * k * X[:, 1]) * _envelope(f, X[:, 2])
        raw[f] = np.repeat(prof, ncomp) if ncomp > 1 else prof
    kw = {}
    for f, b in FIELD_BLOCK.items():
        if f in raw:
            kw[f] = L.restrict({b: raw[f]})[L.block(b)]
        else:
            kw[f] = np.zeros(L.block_sizes[b])
    kw["u"] = project_divergence_free(ops, kw["u"])
    return StateVector(pi=np.zeros(L.n_pi), **kw)


def plate_interpolant(mesh, f, fx, fy, fxy) -> np.ndarray:
    """Raw Hermite nodal data (value, d/dx, d/dy, d2/dxdy) of an analytic plate field."""
    X = mesh.plate.node_coords(1)
    x, y = X[:, 0], X[:, 1]
    out = np.stack([f(x, y), fx(x, y), fy(x, y), fxy(x, y)], axis=1)
    return out.ravel()


def plate_sin2(mesh, k: int = 1) -> np.ndarray:
    c = np.pi * k
    return plate_interpolant(
        mesh,
        lambda x, y: np.sin(c * x) ** 2 * np.sin(c * y) ** 2,
        lambda x, y: c * np.sin(2 * c * x) * np.sin(c * y) ** 2,
        lambda x, y: c * np.sin(c * x) ** 2 * np.sin(2 * c * y),
        lambda x, y: c**2 * np.sin(2 * c * x) * np.sin(2 * c * y),
    )


def build_initial(ops: Operators, name: str = "random", seed: int = 0, amplitude: float = 1.0, modes=None) -> StateVector:
    if name == "zero":
        return zero_state(ops)
    if name == "random":
        return random_state(ops, seed=seed, amplitude=amplitude)
    if name == "fourier":
        return fourier_state(ops, modes or {"w": {"k": 1, "amplitude": amplitude}})
    raise ValueError(f"unknown initial condition {name!r}; choose from {CATALOG}")


__all__ = ["CATALOG", "build_initial", "fourier_state", "plate_interpolant", "plate_sin2",
           "project_divergence_free", "random_state", "zero_state"]
