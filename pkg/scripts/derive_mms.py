"""Derive the manufactured solution and its forcing with sympy.

Writes ``src/poroplate/_mms_exact.py``, a numpy-only module with the exact
fields and the resolvent data f1..f7.  Run from the repository root:

    python scripts/derive_mms.py
"""
from __future__ import annotations

import sys
from pathlib import Path

import sympy as sp
from sympy.printing.numpy import NumPyPrinter

x, y, z, s, h = sp.symbols("x y z s h", real=True)
PARAMS = ("lambda_b", "mu_b", "rho_b", "alpha_b", "c_b", "k_b", "D_plate", "gamma", "rho_p",
          "alpha_p", "c_p", "k_p", "rho_f", "mu_f", "beta_bjs")
P = {name: sp.Symbol(name, positive=True) for name in PARAMS}
pi = sp.pi
X3 = (x, y, z)

VELOCITY_RATIO = sp.Rational(1, 2)  # zeta* = c eta*, v* = c w*


def grad(f, coords=X3):
    return sp.Matrix([sp.diff(f, c) for c in coords])


def div(v, coords=X3):
    return sum(sp.diff(v[i], coords[i]) for i in range(3))


def lap(f, coords):
    return sum(sp.diff(f, c, 2) for c in coords)


def sym_grad(v):
    J = sp.Matrix(3, 3, lambda i, j: sp.diff(v[i], X3[j]))
    return (J + J.T) / 2


def div_tensor(T):
    return sp.Matrix([sum(sp.diff(T[i, j], X3[j]) for j in range(3)) for i in range(3)])


def derive(fluid_amp=sp.Rational(1, 4), press_amp=4, eta_amp=2, r_amp=1, plate_amp=64):
    """Exact fields and data.

    In-plane dependence is built from sums of single-variable modes
    sin(2 pi x), sin(2 pi y); products of periodic modes are avoided because
    their trilinear interpolants on 2 and 4 cells per period are far from
    asymptotic.  The clamped plate profile is a polynomial bump.
    """
    c = VELOCITY_RATIO
    sx, sy = sp.sin(2 * pi * x), sp.sin(2 * pi * y)
    # clamped plate profile; its first derivatives also vanish on the lateral
    # faces, so every bulk flux built from it is periodic
    W = plate_amp * x**2 * (1 - x) ** 2 * y**2 * (1 - y) ** 2
    w_ex = W
    v_ex = c * W

    # Biot displacement: zero on z=1, (0, 0, w) on z=0
    eta = sp.Matrix([eta_amp * z * (1 - z) * sy, eta_amp * z * (1 - z) * sx, W * (1 - z**2)])
    zeta = c * eta

    # divergence-free fluid velocity from a potential Phi with -lap Phi = k2 Phi;
    # phi vanishes to second order at z=-1 and satisfies the slip law at z=0
    k2 = 4 * pi**2
    mu, beta = P["mu_f"], P["beta_bjs"]
    a = -(2 * beta + 2 * mu + mu * k2) / (beta + 4 * mu)
    phi = (1 + z) ** 2 * (1 + a * z)
    Phi = fluid_amp * (sx + sy) / k2
    lapPhi = lap(Phi, (x, y))
    u = sp.Matrix([sp.diff(Phi, x) * sp.diff(phi, z), sp.diff(Phi, y) * sp.diff(phi, z), -lapPhi * phi])
    press = press_amp * ((sx + sy) * (1 + z) / 2 + z / 4)

    # plate pressure: bottom value and flux fixed by the fluid interface conditions
    u3_0 = u[2].subs(z, 0)
    Pm = sp.simplify(press.subs(z, 0) - 2 * mu * sp.diff(u[2], z).subs(z, 0))
    Qm = sp.simplify(v_ex - u3_0)
    Rm = r_amp * (1 + sy / 2)
    sig = s + h / 2
    pp = Pm + Qm / P["k_p"] * sig + Rm * sig**2

    # Biot pressure: continuous with the top plate value, flux balance at z=0
    G0 = pp.subs(s, h / 2)
    G1 = G0 + (Qm + 2 * P["k_p"] * Rm * h) / P["k_b"]
    pb = G0 * (1 - z) + G1 * z * (1 - z)

    # forcing, row by row of (I - A) y = F
    sigma_E = 2 * P["mu_b"] * sym_grad(eta) + P["lambda_b"] * div(eta) * sp.eye(3)
    f1 = eta - zeta
    f2 = (P["rho_b"] * zeta - div_tensor(sigma_E) + P["alpha_b"] * grad(pb)) / P["rho_b"]
    f3 = (P["c_b"] * pb + P["alpha_b"] * div(zeta) - P["k_b"] * lap(pb, X3)) / P["c_b"]

    sigma_b33 = (sigma_E[2, 2] - P["alpha_b"] * pb).subs(z, 0)
    Kpp = sp.integrate(s * pp, (s, -h / 2, h / 2))
    f4 = w_ex - v_ex
    f5 = (P["rho_p"] * v_ex + P["D_plate"] * lap(lap(w_ex, (x, y)), (x, y)) + P["gamma"] * w_ex
          + P["alpha_p"] * lap(Kpp, (x, y)) - pp.subs(s, -h / 2) - sigma_b33) / P["rho_p"]
    f6 = (P["c_p"] * pp - P["alpha_p"] * s * lap(v_ex, (x, y)) - P["k_p"] * sp.diff(pp, s, 2)) / P["c_p"]
    f7 = (P["rho_f"] * u - div_tensor(2 * mu * sym_grad(u)) + grad(press)) / P["rho_f"]

    # clamped biharmonic check (Airy operator)
    airy = sp.sin(pi * x) ** 2 * sp.sin(pi * y) ** 2 * sp.sin(pi * x)
    airy_load = lap(lap(airy, (x, y)), (x, y))

    def hermite(f):
        return [f, sp.diff(f, x), sp.diff(f, y), sp.diff(f, x, y)]

    def second(f):
        return [sp.diff(f, x, 2), sp.diff(f, y, 2), sp.diff(f, x, y)]

    biot = ("x", "y", "z")
    return {
        "eta": (biot, list(eta)),
        "zeta": (biot, list(zeta)),
        "pb": (biot, [pb]),
        "u": (biot, list(u)),
        "pi": (biot, [press]),
        "pp": (("x", "y", "s"), [pp]),
        "w_hermite": (("x", "y"), hermite(w_ex)),
        "v_hermite": (("x", "y"), hermite(v_ex)),
        "f4_hermite": (("x", "y"), hermite(f4)),
        "f1": (biot, list(f1)),
        "f2": (biot, list(f2)),
        "f3": (biot, [f3]),
        "f5": (("x", "y"), [f5]),
        "f6": (("x", "y", "s"), [f6]),
        "f7": (biot, list(f7)),
        "airy_exact_hermite": (("x", "y"), hermite(airy)),
        "airy_exact_hessian": (("x", "y"), second(airy)),
        "airy_load": (("x", "y"), [airy_load]),
    }


HEADER = '''"""Exact manufactured solution and resolvent data (generated; do not edit).

Produced by scripts/derive_mms.py.  Every function takes the material
parameters ``p`` (attribute access), the plate thickness ``h`` and point
coordinates, and returns a list of component arrays.
"""
import numpy as np


def _full(v, ref):
    return np.zeros(np.shape(ref)) + v

'''


def emit(defs) -> str:
    printer = NumPyPrinter({"fully_qualified_modules": True})
    out = [HEADER]
    for name, (coords, exprs) in defs.items():
        used = set().union(*[e.free_symbols for e in exprs])
        pnames = [n for n in PARAMS if P[n] in used]
        repl, reduced = sp.cse([sp.sympify(e) for e in exprs], optimizations="basic")
        lines = [f"def {name}(p, h, {', '.join(coords)}):"]
        for n in pnames:
            lines.append(f"    {n} = p.{n}")
        for sym, val in repl:
            lines.append(f"    {sym} = {printer.doprint(val)}")
        comps = ", ".join(f"_full({printer.doprint(e)}, {coords[0]})" for e in reduced)
        lines.append(f"    return [{comps}]")
        out.append("\n".join(lines) + "\n\n")
    return "\n".join(out).rstrip() + "\n"


def main(argv=None, **amps):
    target = Path(argv[0]) if argv else Path(__file__).resolve().parents[1] / "src" / "poroplate" / "_mms_exact.py"
    code = emit(derive(**amps)).replace("numpy.", "np.")
    target.write_text(code)
    print(f"wrote {target}")


if __name__ == "__main__":
    main(sys.argv[1:])
