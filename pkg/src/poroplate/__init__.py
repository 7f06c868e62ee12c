"""Finite element model of a Biot layer, a poroelastic plate and a Stokes fluid.

Typical use::

    from poroplate import build_mesh, build_operators, MaterialParams, random_state, simulate

    ops = build_operators(build_mesh(4, 4, 4, 2), MaterialParams())
    traj = simulate(ops, random_state(ops, seed=0), dt=0.01, steps=100)
"""
from .config import Config, ConfigError, parse_config
from .evolution import (EnergyReport, StateVector, Trajectory, check_constraints, compute_energy, energy_audit,
                        resolvent_solve, simulate, step_implicit_euler, x_norm)
from .forms import MaterialParams, Operators, build_operators
from .initial import build_initial, fourier_state, random_state, zero_state
from .mesh import MultilayerMesh, build_mesh
from .vonkarman import VkConfig, bracket, potential, solve_airy, step_nonlinear, vk_force

__version__ = "0.1.0"

__all__ = [
    "Config", "ConfigError", "EnergyReport", "MaterialParams", "MultilayerMesh", "Operators", "StateVector",
    "Trajectory", "VkConfig", "bracket", "build_initial", "build_mesh", "build_operators", "check_constraints",
    "compute_energy", "energy_audit", "fourier_state", "parse_config", "potential", "random_state",
    "resolvent_solve", "simulate", "solve_airy", "step_implicit_euler", "step_nonlinear", "vk_force",
    "x_norm", "zero_state",
]
