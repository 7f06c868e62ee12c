"""Saddle-point solves and the inf-sup / coercivity probes."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .forms import SaddleSystem


class SaddleSolveError(RuntimeError):
    """Factorization or iteration failure; ``block`` names the culprit."""

    def __init__(self, msg, block=None, history=None):
        super().__init__(msg)
        self.block = block
        self.history = history or []


class ProbeError(RuntimeError):
    def __init__(self, msg, history=None):
        super().__init__(msg)
        self.history = history or []


@dataclass(frozen=True)
class SaddleSolution:
    phi: np.ndarray
    pi: np.ndarray
    momentum_residual: float  # ||A phi + B^T pi - f|| / max(||f||, tiny)
    constraint_residual: float  # ||B phi - g||
    info: dict = field(default_factory=dict)


def _kkt(A, B):
    m = B.shape[0]
    return sp.bmat([[A, B.T], [B, sp.csr_matrix((m, m))]], format="csc")


def _diagnose(A, B):
    try:
        spla.splu(sp.csc_matrix((A + A.T) * 0.5))
    except RuntimeError:
        return "A"
    if B.shape[0] and np.linalg.matrix_rank(B.toarray()) < B.shape[0]:
        return "B"
    return "KKT"


class SaddleFactor:
    """Reusable direct factorization of [A B^T; B 0]."""

    def __init__(self, A, B):
        A = sp.csr_matrix(A)
        B = sp.csr_matrix(B) if B is not None else sp.csr_matrix((0, A.shape[0]))
        if B.shape[1] != A.shape[0]:
            raise ValueError(f"B has {B.shape[1]} columns, A is {A.shape}")
        self.A, self.B = A, B
        self.n, self.m = A.shape[0], B.shape[0]
        try:
            self.lu = spla.splu(_kkt(A, B), permc_spec="COLAMD")
        except RuntimeError as exc:
            blk = _diagnose(A, B)
            raise SaddleSolveError(f"singular saddle factorization (block {blk}): {exc}", block=blk) from exc

    def solve(self, f, g=None, tol_rel=1e-10, tol_abs=1e-10) -> SaddleSolution:
        f = np.asarray(f, dtype=float)
        g = np.zeros(self.m) if g is None else np.asarray(g, dtype=float)
        if f.shape != (self.n,) or g.shape != (self.m,):
            raise ValueError("load dimension mismatch")
        rhs = np.concatenate([f, g])
        x = self.lu.solve(rhs)
        res = self._residuals(x, f, g)
        refinements = 0
        # iterative refinement if the direct solve left a visible residual
        while (res[0] > tol_rel or res[1] > tol_abs) and refinements < 3:
            r = rhs - self._apply(x)
            x = x + self.lu.solve(r)
            res = self._residuals(x, f, g)
            refinements += 1
        if not np.all(np.isfinite(x)):
            raise SaddleSolveError("non-finite solution", block="KKT")
        return SaddleSolution(
            phi=x[: self.n],
            pi=x[self.n:],
            momentum_residual=res[0],
            constraint_residual=res[1],
            info={"refinements": refinements},
        )

    def _apply(self, x):
        phi, pi = x[: self.n], x[self.n:]
        return np.concatenate([self.A @ phi + self.B.T @ pi, self.B @ phi])

    def _residuals(self, x, f, g):
        phi, pi = x[: self.n], x[self.n:]
        r1 = np.linalg.norm(self.A @ phi + self.B.T @ pi - f)
        nf = np.linalg.norm(f)
        rel = r1 / nf if nf > 0 else r1
        r2 = np.linalg.norm(self.B @ phi - g)
        return rel, r2


def _gmres_solve(system: SaddleSystem, tol, maxiter=500):
    A, B = sp.csr_matrix(system.A), sp.csr_matrix(system.B)
    n, m = A.shape[0], B.shape[0]
    f = system.f
    g = np.zeros(m) if system.g is None else system.g
    K = _kkt(A, B).tocsr()
    luA = spla.splu(sp.csc_matrix(A))
    dA = A.diagonal()
    Sd = np.asarray((B.multiply(B) @ (1.0 / dA)[:, None]).ravel()) if m else np.zeros(0)
    Sd[Sd == 0] = 1.0

    def prec(r):
        # block upper-triangular: [A B^T; 0 -S]^{-1}
        y = -r[n:] / Sd
        x = luA.solve(r[:n] - B.T @ y)
        return np.concatenate([x, y])

    history = []
    M = spla.LinearOperator(K.shape, matvec=prec)
    rhs = np.concatenate([f, g])
    x, info = spla.gmres(K, rhs, M=M, rtol=tol, atol=0.0, restart=100, maxiter=maxiter,
                         callback=lambda r: history.append(float(r)), callback_type="pr_norm")
    if info != 0:
        raise SaddleSolveError("GMRES did not converge", block="KKT", history=history)
    return x, history


def solve_saddle(system: SaddleSystem, method: str = "direct", tol_rel: float = 1e-10, tol_abs: float = 1e-10) -> SaddleSolution:
    """Solve [A B^T; B 0][phi; pi] = [f; g]; residuals are recomputed from inputs."""
    if system.f is None:
        raise ValueError("system has no load vector")
    if method == "direct":
        fac = SaddleFactor(system.A, system.B)
        return fac.solve(system.f, system.g, tol_rel, tol_abs)
    if method == "gmres":
        x, hist = _gmres_solve(system, tol=min(tol_rel, 1e-12))
        n = system.A.shape[0]
        fac_res = SaddleFactor.__new__(SaddleFactor)
        fac_res.A, fac_res.B, fac_res.n, fac_res.m = sp.csr_matrix(system.A), sp.csr_matrix(system.B), n, system.B.shape[0]
        g = np.zeros(fac_res.m) if system.g is None else system.g
        r1, r2 = fac_res._residuals(x, system.f, g)
        return SaddleSolution(x[:n], x[n:], r1, r2, {"history": hist})
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# eigenvalue probes

def spd_factor(K, name="matrix"):
    """Sparse LDL-style check: factor without pivoting and require a positive diagonal."""
    K = sp.csc_matrix(K)
    try:
        lu = spla.splu(K, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0, options={"SymmetricMode": True})
    except RuntimeError as exc:
        raise ValueError(f"{name} is singular") from exc
    d = lu.U.diagonal()
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        raise ValueError(f"{name} is not positive definite")
    return lu


def _smallest_pair(apply_inv, K, Mmat, n, k=6, tol=1e-8, maxiter=500, seed=0):
    """Block inverse iteration with Rayleigh-Ritz for min eig of K x = lam M x.

    ``apply_inv(X)`` returns K^{-1} X (possibly shifted).  Converges at rate
    lam_1 / lam_{k+1}, so clustered low modes do not stall it.
    """
    k = max(1, min(k, n))
    rng = np.random.default_rng(seed)
    Q = rng.standard_normal((n, k))
    theta_old = np.inf
    history = []
    for it in range(1, maxiter + 1):
        Q = apply_inv(Mmat @ Q)
        Q, _ = np.linalg.qr(Q)
        KQ = K @ Q
        MQ = Mmat @ Q
        Kr = Q.T @ KQ
        Mr = Q.T @ MQ
        Kr = 0.5 * (Kr + Kr.T)
        Mr = 0.5 * (Mr + Mr.T)
        vals, vecs = sla.eigh(Kr, Mr)
        Q = Q @ vecs
        theta = float(vals[0])
        history.append(theta)
        if abs(theta - theta_old) <= tol * max(abs(theta), 1e-300) or (theta_old != np.inf and abs(theta - theta_old) < 1e-15 * max(1.0, abs(theta))):
            return theta, Q[:, 0], history
        theta_old = theta
    raise ProbeError("inverse iteration did not converge", history=history)


def schur_complement(G, B):
    """Dense B G^{-1} B^T with G factorized once."""
    B = sp.csr_matrix(B)
    lu = spd_factor(G, "G")
    X = lu.solve(np.asarray(B.T.toarray(), dtype=float))
    S = B @ X
    return 0.5 * (S + S.T)


def estimate_infsup(G, B, M_pi, mode: str = "fluid", fluid_slice: slice | None = None,
                    tol: float = 1e-8, maxiter: int = 500) -> float:
    """beta_h = sqrt(min eig of B G^{-1} B^T q = beta^2 M_pi q).

    In ``fluid`` mode G and B are restricted to ``fluid_slice`` (the velocity
    block); ``full`` uses the whole Gram matrix.
    """
    G = sp.csr_matrix(G)
    B = sp.csr_matrix(B)
    if mode == "fluid":
        if fluid_slice is not None:
            G = G[fluid_slice, fluid_slice]
            B = B[:, fluid_slice]
    elif mode != "full":
        raise ValueError(f"unknown inf-sup mode {mode!r}")
    S = schur_complement(G, B)
    Mp = np.asarray(sp.csr_matrix(M_pi).toarray())
    m = S.shape[0]
    shift = 1e-12 * (np.trace(S) / max(np.trace(Mp), 1e-300))
    lu = sla.lu_factor(S + shift * Mp)
    lam, _, _ = _smallest_pair(lambda X: sla.lu_solve(lu, X), S, Mp, m, k=min(8, m), tol=tol, maxiter=maxiter)
    return float(np.sqrt(max(lam, 0.0)))


def infsup_dense(G, B, M_pi) -> float:
    """Reference value from a dense generalized eigensolve (small problems)."""
    S = schur_complement(G, B)
    vals = sla.eigh(S, np.asarray(sp.csr_matrix(M_pi).toarray()), eigvals_only=True)
    return float(np.sqrt(max(vals[0], 0.0)))

def infsup_reduced(G, B, M_pi, rel_tol: float = 1e-10) -> tuple[float, int]:
    """Inf-sup constant on the complement of the pressure kernel.

    Returns ``(beta, kernel_dim)`` where ``kernel_dim`` counts generalized
    eigenvalues below ``rel_tol`` times the largest (spurious modes of
    unstable pairs) and ``beta`` is the square root of the smallest one above.
    """
    S = schur_complement(G, B)
    vals = sla.eigh(S, np.asarray(sp.csr_matrix(M_pi).toarray()), eigvals_only=True)
    cut = rel_tol * vals[-1]
    kernel = int(np.sum(vals <= cut))
    rest = vals[vals > cut]
    return (float(np.sqrt(rest[0])) if rest.size else 0.0), kernel



def probe_coercivity(A, G, tol: float = 1e-8, maxiter: int = 500) -> float:
    """Smallest eigenvalue of sym(A) x = lam G x by block inverse iteration."""
    A = sp.csr_matrix(A)
    G = sp.csr_matrix(G)
    spd_factor(G, "G")
    Ssym = ((A + A.T) * 0.5).tocsc()
    try:
        lu = spla.splu(Ssym)
    except RuntimeError as exc:
        raise ProbeError(f"symmetric part is singular: {exc}") from exc
    n = A.shape[0]
    lam, _, _ = _smallest_pair(lambda X: lu.solve(np.asarray(X)), Ssym, G, n, k=min(6, n), tol=tol, maxiter=maxiter)
    return lam
