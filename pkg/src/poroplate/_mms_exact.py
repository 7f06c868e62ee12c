"""Exact manufactured solution and resolvent data (generated; do not edit).

Produced by scripts/derive_mms.py.  Every function takes the material
parameters ``p`` (attribute access), the plate thickness ``h`` and point
coordinates, and returns a list of component arrays.
"""
import numpy as np


def _full(v, ref):
    return np.zeros(np.shape(ref)) + v


def eta(p, h, x, y, z):
    x0 = 2*np.pi
    x1 = 2*z*(z - 1)
    return [_full(-x1*np.sin(x0*y), x), _full(-x1*np.sin(x*x0), x), _full(-64*x**2*y**2*(x - 1)**2*(y - 1)**2*(z**2 - 1), x)]


def zeta(p, h, x, y, z):
    x0 = 2*np.pi
    x1 = z*(z - 1)
    return [_full(-x1*np.sin(x0*y), x), _full(-x1*np.sin(x*x0), x), _full(-32*x**2*y**2*(x - 1)**2*(y - 1)**2*(z**2 - 1), x)]


def pb(p, h, x, y, z):
    k_b = p.k_b
    k_p = p.k_p
    mu_f = p.mu_f
    beta_bjs = p.beta_bjs
    x0 = 2*np.pi
    x1 = np.sin(x*x0)
    x2 = np.sin(x0*y)
    x3 = x2 + 2
    x4 = 128*x**2*y**2*(x - 1)**2*(y - 1)**2
    x5 = x1 + x2
    x6 = 2*h**2*x3 - h*(-x4 + x5)/k_p + 4*x5*(2*beta_bjs - mu_f**2*(3 - 2*np.pi**2) + 8*mu_f)/(beta_bjs + 4*mu_f)
    return [_full(-(x6 + z*(x6 + (4*h*k_p*x3 - x1 - x2 + x4)/k_b))*((1/4)*z - 1/4), x)]


def u(p, h, x, y, z):
    mu_f = p.mu_f
    beta_bjs = p.beta_bjs
    x0 = 2*np.pi
    x1 = x*x0
    x2 = z + 1
    x3 = (beta_bjs + mu_f + 2*np.pi**2*mu_f)/(beta_bjs + 4*mu_f)
    x4 = 2*x3*z - 1
    x5 = (1/4)*x2*(x2*x3 + x4)/np.pi
    x6 = x0*y
    return [_full(-x5*np.cos(x1), x), _full(-x5*np.cos(x6), x), _full(-1/4*x2**2*x4*(np.sin(x1) + np.sin(x6)), x)]


def pi(p, h, x, y, z):
    x0 = 2*np.pi
    return [_full(z + 2*(z + 1)*(np.sin(x*x0) + np.sin(x0*y)), x)]


def pp(p, h, x, y, s):
    k_p = p.k_p
    mu_f = p.mu_f
    beta_bjs = p.beta_bjs
    x0 = h + 2*s
    x1 = 2*np.pi
    x2 = np.sin(x1*y)
    x3 = x2 + np.sin(x*x1)
    return [_full((1/8)*x0**2*(x2 + 2) + x3*(2*beta_bjs - mu_f**2*(3 - 2*np.pi**2) + 8*mu_f)/(beta_bjs + 4*mu_f) - 1/8*x0*(-128*x**2*y**2*(x - 1)**2*(y - 1)**2 + x3)/k_p, x)]


def w_hermite(p, h, x, y):
    x0 = y - 1
    x1 = x0**2*y**2
    x2 = x - 1
    x3 = x**2*x2**2
    x4 = x*y
    x5 = x0*x2
    return [_full(64*x1*x3, x), _full(128*x*x1*x2*(2*x - 1), x), _full(128*x0*x3*y*(2*y - 1), x), _full(256*x4*x5*(x*x0 + x2*y + x4 + x5), x)]


def v_hermite(p, h, x, y):
    x0 = y - 1
    x1 = x0**2*y**2
    x2 = x - 1
    x3 = x**2*x2**2
    x4 = x*y
    x5 = x0*x2
    return [_full(32*x1*x3, x), _full(64*x*x1*x2*(2*x - 1), x), _full(64*x0*x3*y*(2*y - 1), x), _full(128*x4*x5*(x*x0 + x2*y + x4 + x5), x)]


def f4_hermite(p, h, x, y):
    x0 = y - 1
    x1 = x0**2*y**2
    x2 = x - 1
    x3 = x**2*x2**2
    x4 = x*y
    x5 = x0*x2
    return [_full(32*x1*x3, x), _full(64*x*x1*x2*(2*x - 1), x), _full(64*x0*x3*y*(2*y - 1), x), _full(128*x4*x5*(x*x0 + x2*y + x4 + x5), x)]


def f1(p, h, x, y, z):
    x0 = 2*np.pi
    x1 = z*(z - 1)
    return [_full(-x1*np.sin(x0*y), x), _full(-x1*np.sin(x*x0), x), _full(-32*x**2*y**2*(x - 1)**2*(y - 1)**2*(z**2 - 1), x)]


def f2(p, h, x, y, z):
    lambda_b = p.lambda_b
    mu_b = p.mu_b
    rho_b = p.rho_b
    alpha_b = p.alpha_b
    k_b = p.k_b
    k_p = p.k_p
    mu_f = p.mu_f
    beta_bjs = p.beta_bjs
    x0 = rho_b**(-1.0)
    x1 = 2*np.pi
    x2 = x1*y
    x3 = np.sin(x2)
    x4 = z - 1
    x5 = x4*z
    x6 = rho_b*x5
    x7 = np.pi**2
    x8 = 8*mu_b*x5*x7
    x9 = y**2
    x10 = x - 1
    x11 = x10**2
    x12 = y - 1
    x13 = x12**2
    x14 = x**2
    x15 = 64*z
    x16 = x11*x15
    x17 = x13*x9
    x18 = x14*x17
    x19 = x10*x18
    x20 = k_b**(-1.0)
    x21 = x*x1
    x22 = np.pi*np.cos(x21)
    x23 = 128*x11
    x24 = x17*x23
    x25 = x*x24 + 128*x19 - x22
    x26 = h/k_p
    x27 = 4*(2*beta_bjs - mu_f**2*(3 - 2*x7) + 8*mu_f)/(beta_bjs + 4*mu_f)
    x28 = x22*x27 + x25*x26
    x29 = (1/2)*alpha_b*x4
    x30 = np.sin(x21)
    x31 = x13*y
    x32 = x14*x16
    x33 = x12*x9
    x34 = np.pi*np.cos(x2)
    x35 = 4*h*k_p
    x36 = x14*x23
    x37 = x31*x36 + x33*x36 - x34
    x38 = 2*h**2
    x39 = x26*x37 + x27*x34 + x34*x38
    x40 = x14*x24
    x41 = z**2 - 1
    x42 = mu_b*x41
    x43 = x3 + 2
    x44 = x3 + x30
    x45 = x26*(128*x11*x13*x14*x9 - x44) + x27*x44 + x38*x43
    x46 = x20*(-x3 - x30 + x35*x43 + x40) + x45
    return [_full(x0*(256*lambda_b*x*x11*x13*x9*z + 256*lambda_b*x10*x13*x14*x9*z + 4*mu_b*(x*x16*x17 + x15*x19 + x3) - x29*(x28 + z*(x20*x25 + x28)) - x3*x6 - x3*x8), x), _full(x0*(256*lambda_b*x11*x12*x14*x9*z + 256*lambda_b*x11*x13*x14*y*z + 4*mu_b*(x30 + x31*x32 + x32*x33) - x29*(x39 + z*(x20*(x34*x35 + x37) + x39)) - x30*x6 - x30*x8), x), _full(-x0*((1/4)*alpha_b*(x4*x46 + x45 + x46*z) - lambda_b*x40 - 256*mu_b*x11*x18 + 32*rho_b*x11*x13*x14*x41*x9 - 128*x17*x42*(4*x*x10 + x11 + x14) - x36*x42*(4*x12*y + x13 + x9)), x)]


def f3(p, h, x, y, z):
    alpha_b = p.alpha_b
    c_b = p.c_b
    k_b = p.k_b
    k_p = p.k_p
    mu_f = p.mu_f
    beta_bjs = p.beta_bjs
    x0 = x - 1
    x1 = x0**2
    x2 = x**2
    x3 = y**2
    x4 = y - 1
    x5 = x4**2
    x6 = x3*x5
    x7 = 64*x6
    x8 = x2*x7
    x9 = z - 1
    x10 = k_b**(-1.0)
    x11 = 2*np.pi
    x12 = np.sin(x*x11)
    x13 = np.sin(x11*y)
    x14 = x13 + 2
    x15 = 4*h*k_p
    x16 = x1*x2
    x17 = 128*x16*x6
    x18 = h**2
    x19 = x12 + x13
    x20 = h/k_p
    x21 = np.pi**2
    x22 = 2*x21
    x23 = 4*(2*beta_bjs - mu_f**2*(3 - x22) + 8*mu_f)/(beta_bjs + 4*mu_f)
    x24 = 2*x14*x18 + x19*x23 - x20*(-x17 + x19)
    x25 = x10*(-x12 - x13 + x14*x15 + x17) + x24
    x26 = x13*x21
    x27 = 64*x16
    x28 = 256*x16*x4*y + x26 + x27*x3 + x27*x5
    x29 = x13*x18*x22 - x20*x28 + x23*x26
    x30 = x12*x21
    x31 = 256*x*x0*x6 + x1*x7 + x30 + x8
    x32 = x20*x31 - x23*x30
    return [_full(-(alpha_b*x1*x8*z + (1/4)*c_b*x9*(x24 + x25*z) + (1/2)*k_b*(-x25 + 2*x9*(x29 + z*(-x10*(-x15*x26 + x28) + x29)) - 2*x9*(x32 + z*(x10*x31 + x32))))/c_b, x)]


def f5(p, h, x, y):
    alpha_b = p.alpha_b
    D_plate = p.D_plate
    gamma = p.gamma
    rho_p = p.rho_p
    alpha_p = p.alpha_p
    k_p = p.k_p
    mu_f = p.mu_f
    beta_bjs = p.beta_bjs
    x0 = y - 1
    x1 = x0**2
    x2 = y**2
    x3 = 64*x2
    x4 = x**2
    x5 = x - 1
    x6 = x5**2
    x7 = x4*x6
    x8 = x1*x2
    x9 = x7*x8
    x10 = 2*np.pi
    x11 = np.sin(x*x10)
    x12 = np.sin(x10*y)
    x13 = x11 + x12
    x14 = np.pi**2
    x15 = 2*x14
    x16 = x13*(2*beta_bjs - mu_f**2*(3 - x15) + 8*mu_f)/(beta_bjs + 4*mu_f)
    x17 = k_p**(-1.0)
    x18 = 4*x0*y
    x19 = x1 + x18 + x2
    x20 = 4*x*x5
    x21 = x20 + x4 + x6
    x22 = 64*x17
    x23 = x**3*x17
    x24 = x**4
    x25 = 384*x4
    x26 = x17*y
    x27 = 768*x23
    x28 = 384*x24
    x29 = x2*x25
    x30 = y**3
    x31 = y**4
    x32 = 384*x
    x33 = 768*x30
    return [_full((256*D_plate*(x1*x21 + x18*x21 + x19*x20 + x19*x4 + x19*x6 + x2*x21 + 6*x7 + 6*x8) + (1/4)*alpha_b*(2*h**2*(x12 + 2) - h*x17*(x13 - 128*x9) + 4*x16) + (1/12)*alpha_p*h**3*(-h*x12*x15 + x12*x14*x17 + x17*x2*x28 + x17*x29 + x17*(x*x33 + x11*x14 - x2*x32 + x25*x31 + x29 + x3 - 128*x30 - x31*x32 + 64*x31 - x33*x4) - x2*x27 + x22*x24 + x22*x4 - 128*x23 - x25*x26 - x26*x28 + x27*y) + gamma*x1*x3*x7 + 32*rho_p*x9 - x16)/rho_p, x)]


def f6(p, h, x, y, s):
    alpha_p = p.alpha_p
    c_p = p.c_p
    k_p = p.k_p
    mu_f = p.mu_f
    beta_bjs = p.beta_bjs
    x0 = 2*np.pi
    x1 = np.sin(x0*y)
    x2 = x1 + 2
    x3 = y**2
    x4 = y - 1
    x5 = x4**2
    x6 = x**2
    x7 = x - 1
    x8 = x7**2
    x9 = x6*x8
    x10 = x3*x5
    x11 = h + 2*s
    x12 = x1 + np.sin(x*x0)
    return [_full(-(64*alpha_p*s*(x10*(4*x*x7 + x6 + x8) + x9*(x3 + 4*x4*y + x5)) - 1/8*c_p*(x11**2*x2 + 8*x12*(2*beta_bjs - mu_f**2*(3 - 2*np.pi**2) + 8*mu_f)/(beta_bjs + 4*mu_f) - x11*(-128*x10*x9 + x12)/k_p) + k_p*x2)/c_p, x)]


def f7(p, h, x, y, z):
    rho_f = p.rho_f
    mu_f = p.mu_f
    beta_bjs = p.beta_bjs
    x0 = 2*np.pi
    x1 = x*x0
    x2 = rho_f**(-1.0)
    x3 = z + 1
    x4 = np.pi**2
    x5 = (beta_bjs + 2*mu_f*x4 + mu_f)/(beta_bjs + 4*mu_f)
    x6 = x3*x5
    x7 = 2*x5*z - 1
    x8 = x6 + x7
    x9 = 2*np.pi*x3
    x10 = np.pi**(-1.0)
    x11 = (1/4)*rho_f
    x12 = x3**2
    x13 = -x7
    x14 = x2*(-mu_f*x8*x9 + (1/2)*mu_f*(x0*x12*x5 + 3*x10*x5 - x13*x9) - x10*x11*x3*x8 + 4*np.pi*x3)
    x15 = x0*y
    x16 = np.sin(x1)
    x17 = np.sin(x15)
    x18 = x16 + x17
    x19 = 4*x6 + x7
    x20 = (1/2)*mu_f*(2*x12*x13*x4 - x19)
    return [_full(x14*np.cos(x1), x), _full(x14*np.cos(x15), x), _full(x2*(mu_f*x18*x19 - x11*x12*x18*x7 + x16*x20 + 2*x16 + x17*x20 + 2*x17 + 1), x)]


def airy_exact_hermite(p, h, x, y):
    x0 = np.pi*x
    x1 = np.sin(x0)
    x2 = x1**3
    x3 = np.pi*y
    x4 = np.sin(x3)
    x5 = x4**2
    x6 = x1**2*np.cos(x0)
    x7 = x4*np.cos(x3)
    return [_full(x2*x5, x), _full(3*np.pi*x5*x6, x), _full(2*np.pi*x2*x7, x), _full(6*np.pi**2*x6*x7, x)]


def airy_exact_hessian(p, h, x, y):
    x0 = np.pi**2
    x1 = np.pi*x
    x2 = np.sin(x1)
    x3 = np.pi*y
    x4 = np.sin(x3)
    x5 = x4**2
    x6 = x2**2
    x7 = np.cos(x1)
    x8 = np.cos(x3)
    return [_full(-3*x0*x2*x5*(x6 - 2*x7**2), x), _full(-2*x0*x2**3*(x5 - x8**2), x), _full(6*x0*x4*x6*x7*x8, x)]


def airy_load(p, h, x, y):
    x0 = np.pi*x
    x1 = np.sin(x0)
    x2 = x1**2
    x3 = np.pi*y
    x4 = np.sin(x3)**2
    x5 = np.cos(x3)**2
    x6 = np.cos(x0)**2
    x7 = x2 - 2*x6
    x8 = x4 - x5
    return [_full(np.pi**4*x1*(26*x2*x4 - 8*x2*x5 + 6*x2*x8 - 54*x4*x6 + 9*x4*x7 - 6*x5*x7 - 12*x6*x8), x)]
