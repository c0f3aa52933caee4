"""C-, G- and Q-eigenpairs of structured complex tensors.

All three notions are KKT points of a real-valued form ``phi`` of total
degree ``D`` on the complex unit sphere.  With the Wirtinger gradient
``grad = d phi / d conj(x)`` the KKT system reads ``grad = mu x`` where
``mu = (D/2) phi``.  The solver combines shifted power iterations (ascent
or descent) with a Newton polish on the real-ified KKT system.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import (
    as_tensor,
    batch_contract_tail,
    contract_tail,
    is_cps,
    is_css,
    is_symmetric,
    outer_product,
    partial_eval,
    tensor_norm,
)
from .bijection import embed_cps_to_css
from .errors import ArgumentError, ConvergenceError, RelationError, StructureError

ORBIT_TOL = 1e-6


@dataclass(frozen=True)
class EigenPair:
    """One eigenpair. ``lam`` is real; ``x`` has unit norm."""

    lam: float
    x: np.ndarray
    residual: float
    kind: str
    iters: int = 0
    start_id: int = 0


@dataclass(frozen=True)
class SolverConfig:
    """Multistart settings.

    ``shift`` of ``None`` selects the adaptive shift of the power phase.
    """

    starts: int = 32
    max_iters: int = 2000
    tol: float = 1e-8
    shift: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.starts < 1:
            raise ArgumentError("starts must be at least 1")
        if not self.tol > 0:
            raise ArgumentError("tol must be positive")
        if self.max_iters < 1:
            raise ArgumentError("max_iters must be at least 1")


def random_unit_vectors(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    """Rows uniform on the complex unit sphere of C^n."""
    Z = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


def orbit_distance(x: np.ndarray, y: np.ndarray) -> float:
    """``min_phi ||x - y e^{i phi}||`` for unit vectors."""
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * abs(np.vdot(y, x)))))


def canonical_phase(x: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(x)))
    if abs(x[k]) == 0:
        return x
    return x * (abs(x[k]) / x[k])


def _broadcast(T: np.ndarray, S: int) -> np.ndarray:
    return np.broadcast_to(T, (S,) + T.shape).copy()


# --------------------------------------------------------------------------
# problem definitions


class _Problem:
    """Real objective on the unit sphere with its KKT data.

    ``D`` is the total degree, ``scale`` bounds the gradient norm.
    """

    kind: str
    D: int
    n: int
    scale: float

    def grad_phi(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Batched Wirtinger gradient (S, n) and objective (S,)."""
        raise NotImplementedError

    def hessian(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``A = d grad/d x`` and ``B = d grad/d conj(x)`` at a single point."""
        raise NotImplementedError

    def eigenvalue(self, phi: float) -> float:
        raise NotImplementedError

    def residual(self, lam: float, x: np.ndarray) -> float:
        raise NotImplementedError


class _CProblem(_Problem):
    kind = "C"

    def __init__(self, F: np.ndarray):
        self.F = F
        self.n = F.shape[0]
        self.d = F.ndim // 2
        self.D = F.ndim
        self.scale = max(self.D * tensor_norm(F), 1e-300)

    def grad_phi(self, X):
        d = self.d
        c = batch_contract_tail(self.F, [X.conj()] * (d - 1) + [X] * d)
        phi = np.einsum("sj,sj->s", X.conj(), c).real
        return d * c, phi

    def hessian(self, x):
        d, xc = self.d, x.conj()
        A = partial_eval(self.F, [(k, xc) for k in range(1, d)] + [(k, x) for k in range(d + 1, 2 * d)])
        A = d * d * A
        if d == 1:
            B = np.zeros_like(A)
        else:
            B = partial_eval(self.F, [(k, xc) for k in range(2, d)] + [(k, x) for k in range(d, 2 * d)])
            B = d * (d - 1) * B
        return A, B

    def eigenvalue(self, phi):
        return float(phi)

    def residual(self, lam, x):
        return c_eig_residual(self.F, lam, x, check=False)


class _GProblem(_Problem):
    kind = "G"

    def __init__(self, G: np.ndarray):
        self.G = G
        self.n = G.shape[0] // 2
        self.D = G.ndim
        self.scale = max(self.D * tensor_norm(G), 1e-300)

    def _stack(self, X):
        return np.concatenate([X.conj(), X], axis=-1)

    def grad_phi(self, X):
        W = self._stack(X)
        if self.D == 1:
            g = _broadcast(self.G, X.shape[0])
        else:
            g = batch_contract_tail(self.G, [W] * (self.D - 1))
        phi = np.einsum("sj,sj->s", W, g).real
        return self.D * g[:, : self.n], phi

    def hessian(self, x):
        n, D = self.n, self.D
        if D == 1:
            Z = np.zeros((n, n), dtype=complex)
            return Z, Z
        w = self._stack(x)
        K = contract_tail(self.G, [w] * (D - 2))
        c = D * (D - 1)
        return c * K[:n, n:], c * K[:n, :n]

    def eigenvalue(self, phi):
        return float(phi) / 2

    def residual(self, lam, x):
        return g_eig_residual(self.G, lam, x, check=False)


class _QProblem(_Problem):
    kind = "Q"

    def __init__(self, H: np.ndarray):
        self.H = H
        self.n = H.shape[0]
        self.D = H.ndim
        self.scale = max(self.D * tensor_norm(H), 1e-300)

    def grad_phi(self, X):
        if self.D == 1:
            q = _broadcast(self.H, X.shape[0])
        else:
            q = batch_contract_tail(self.H, [X] * (self.D - 1))
        phi = np.einsum("sj,sj->s", X, q).real
        return (self.D / 2) * q.conj(), phi

    def hessian(self, x):
        n, d = self.n, self.D
        A = np.zeros((n, n), dtype=complex)
        if d == 1:
            return A, A
        K = contract_tail(self.H, [x] * (d - 2))
        return A, (d / 2) * (d - 1) * K.conj()

    def eigenvalue(self, phi):
        return float(phi)

    def residual(self, lam, x):
        return q_eig_residual(self.H, lam, x, check=False)


# --------------------------------------------------------------------------
# iterations


def _power_phase(prob: _Problem, X: np.ndarray, sign: float, cfg: SolverConfig) -> tuple[np.ndarray, np.ndarray]:
    """Batched shifted power iterations ``x <- normalize(sign*grad + gamma*x)``.

    ``gamma`` starts at ``cfg.shift`` (or 0) and doubles whenever a step would
    lower ``sign*phi``.  Returns the final points and iteration counts.
    """
    S = X.shape[0]
    X = X.copy()
    adaptive = cfg.shift is None
    gamma = np.full(S, 0.0 if adaptive else float(cfg.shift))
    gamma_cap = 2.0**10 * prob.scale
    gamma_first = 2.0**-4 * prob.scale
    grad, phi = prob.grad_phi(X)
    iters = np.zeros(S, dtype=int)
    active = np.ones(S, dtype=bool)
    for _ in range(cfg.max_iters):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        Y = sign * grad[idx] + gamma[idx, None] * X[idx]
        norms = np.linalg.norm(Y, axis=1)
        ok = norms > 0
        Xn = X[idx].copy()
        Xn[ok] = Y[ok] / norms[ok, None]
        gn, pn = prob.grad_phi(Xn)
        worse = sign * (pn - phi[idx]) < -1e-14 * prob.scale
        if adaptive:
            retry = worse & (gamma[idx] < gamma_cap)
            gamma[idx[retry]] = np.where(gamma[idx[retry]] == 0, gamma_first, 2 * gamma[idx[retry]])
        else:
            retry = np.zeros_like(worse)
        take = ~retry
        moved = np.linalg.norm(Xn - X[idx], axis=1)
        ti = idx[take]
        X[ti], grad[ti], phi[ti] = Xn[take], gn[take], pn[take]
        iters[idx] += 1
        mu = (prob.D / 2) * phi[idx]
        kkt = np.linalg.norm(grad[idx] - mu[:, None] * X[idx], axis=1) / prob.scale
        done = take & ((kkt < 1e-7) | (moved < 1e-13))
        active[idx[done]] = False
    return X, iters


def _newton(prob: _Problem, x: np.ndarray, max_steps: int = 100, cap: float = 0.4) -> tuple[np.ndarray, int]:
    """Newton iterations on the real-ified KKT system ``grad = mu x, |x| = 1``."""
    n = prob.n
    best_x, best_r = x, np.inf
    steps = 0
    for steps in range(1, max_steps + 1):
        grad, phi = prob.grad_phi(x[None, :])
        grad, phi = grad[0], float(phi[0])
        mu = (prob.D / 2) * phi
        r = grad - mu * x
        rn = float(np.linalg.norm(r)) / prob.scale
        if rn < best_r:
            best_x, best_r = x, rn
        if rn < 1e-15:
            break
        A, B = prob.hessian(x)
        Ap = A - mu * np.eye(n)
        P, M = Ap + B, Ap - B
        J = np.zeros((2 * n + 1, 2 * n + 1))
        J[:n, :n], J[:n, n : 2 * n] = P.real, -M.imag
        J[n : 2 * n, :n], J[n : 2 * n, n : 2 * n] = P.imag, M.real
        J[:n, 2 * n], J[n : 2 * n, 2 * n] = -x.real, -x.imag
        J[2 * n, :n], J[2 * n, n : 2 * n] = x.real, x.imag
        rhs = np.concatenate([-r.real, -r.imag, [0.0]])
        sol = np.linalg.lstsq(J, rhs, rcond=None)[0]
        dx = sol[:n] + 1j * sol[n : 2 * n]
        step = np.linalg.norm(dx)
        if step > cap:
            dx *= cap / step
        y = x + dx
        ny = np.linalg.norm(y)
        if ny == 0:
            break
        x = y / ny
        if step < 1e-16:
            break
    grad, phi = prob.grad_phi(x[None, :])
    rn = float(np.linalg.norm(grad[0] - (prob.D / 2) * phi[0] * x)) / prob.scale
    if rn > best_r:
        x = best_x
    return x, steps


def _complement_start(found: list[np.ndarray], y: np.ndarray) -> np.ndarray:
    if not found:
        return y
    Q, _ = np.linalg.qr(np.array(found).T)
    z = y - Q @ (Q.conj().T @ y)
    nz = np.linalg.norm(z)
    if nz < 1e-8:
        return y
    return z / nz


def _phi_single(prob: _Problem, x: np.ndarray) -> float:
    return float(prob.grad_phi(x[None, :])[1][0])


def _solve(prob: _Problem, cfg: SolverConfig) -> list[EigenPair]:
    """Multistart driver shared by the three eigenproblems.

    Start ``k`` runs, by ``k % 4``: ascent, descent, Newton from a random
    point orthogonal to the eigenvectors found so far, Newton from a random
    point.  Results are merged in start order.
    """
    rng = np.random.default_rng(cfg.seed)
    S, n = cfg.starts, prob.n
    X0 = random_unit_vectors(rng, S, n)
    Y0 = random_unit_vectors(rng, S, n)
    ids = np.arange(S)
    powered = {}
    for sign, mode in ((1.0, 0), (-1.0, 1)):
        sel = ids[ids % 4 == mode]
        if mode == 1 and S < 2:
            continue
        if sel.size:
            Xp, its = _power_phase(prob, X0[sel], sign, cfg)
            for k, x, it in zip(sel, Xp, its):
                powered[int(k)] = (x, int(it))
    pairs: list[EigenPair] = []
    best_res = np.inf
    for k in range(S):
        if k in powered:
            x, its = powered[k]
        elif k % 4 == 2:
            x, its = _complement_start([p.x for p in pairs], Y0[k]), 0
        else:
            x, its = X0[k], 0
        x, steps = _newton(prob, x)
        lam = prob.eigenvalue(_phi_single(prob, x))
        if prob.kind == "C":
            x = canonical_phase(x)
        res = prob.residual(lam, x)
        best_res = min(best_res, res)
        if res > cfg.tol:
            continue
        cand = EigenPair(lam, x, res, prob.kind, its + steps, k)
        if any(abs(p.lam - lam) <= cfg.tol and orbit_distance(p.x, x) <= ORBIT_TOL for p in pairs):
            continue
        pairs.append(cand)
    if not pairs:
        raise ConvergenceError(f"no start converged for the {prob.kind}-eigenproblem", best_res)
    pairs.sort(key=lambda p: (-p.lam, p.start_id))
    return pairs


# --------------------------------------------------------------------------
# residuals


def _unit(x, n: int) -> np.ndarray:
    v = np.asarray(x, dtype=complex)
    if v.shape != (n,):
        raise ArgumentError(f"expected a vector of length {n}, got shape {v.shape}")
    return v


def _require(check, what: str):
    if not check:
        raise StructureError(f"tensor is not {what} ({check.reason})")


def c_eig_residual(F, lam: float, x, check: bool = True) -> float:
    """Defect of the C-eigen system and of its alternate (last slot free) form."""
    T = as_tensor(F) if check else F
    if check:
        _require(is_cps(T), "conjugate partial-symmetric")
    d = T.ndim // 2
    x = _unit(x, T.shape[0])
    xc = x.conj()
    first = contract_tail(T, [xc] * (d - 1) + [x] * d)
    last = partial_eval(T, [(k, xc) for k in range(d)] + [(k, x) for k in range(d, 2 * d - 1)])
    return float(max(np.linalg.norm(first - lam * x), np.linalg.norm(last - lam * xc)))


def g_eig_residual(G, lam: float, x, check: bool = True) -> float:
    """Defect of ``G((.;.), w,...,w) = lam (x; conj(x))`` with ``w = (conj(x); x)``."""
    T = as_tensor(G) if check else G
    if check:
        _require(is_css(T), "conjugate super-symmetric")
    x = _unit(x, T.shape[0] // 2)
    w = np.concatenate([x.conj(), x])
    g = contract_tail(T, [w] * (T.ndim - 1))
    return float(np.linalg.norm(g - lam * np.concatenate([x, x.conj()])))


def q_eig_residual(H, lam: float, x, check: bool = True) -> float:
    """Defect of ``H(., x,...,x) = lam conj(x)``."""
    T = as_tensor(H) if check else H
    if check:
        _require(is_symmetric(T), "symmetric")
    x = _unit(x, T.shape[0])
    q = contract_tail(T, [x] * (T.ndim - 1))
    return float(np.linalg.norm(q - lam * x.conj()))


def us_eig_residual(H, lam: float, u) -> float:
    """Defect of the unitary-symmetric system at ``(lam, u)``.

    Both ``conj(H)(., u,...,u) = lam conj(u)`` and
    ``H(., conj(u),...,conj(u)) = lam u`` are measured.
    """
    T = as_tensor(H)
    u = _unit(u, T.shape[0])
    a = contract_tail(T.conj(), [u] * (T.ndim - 1)) - lam * u.conj()
    b = contract_tail(T, [u.conj()] * (T.ndim - 1)) - lam * u
    return float(max(np.linalg.norm(a), np.linalg.norm(b)))


# --------------------------------------------------------------------------
# public solvers


def solve_c_eig(F, cfg: SolverConfig | None = None) -> list[EigenPair]:
    """C-eigenpairs ``F(., conj(x)^{d-1}, x^d) = lam x`` of a CPS tensor, by decreasing ``lam``."""
    T = as_tensor(F)
    _require(is_cps(T), "conjugate partial-symmetric")
    return _solve(_CProblem(T), cfg or SolverConfig())


def solve_g_eig(G, cfg: SolverConfig | None = None) -> list[EigenPair]:
    """G-eigenpairs of a CSS tensor; ``lam`` is half the form value ``G(w,...,w)``."""
    T = as_tensor(G)
    _require(is_css(T), "conjugate super-symmetric")
    return _solve(_GProblem(T), cfg or SolverConfig())


def solve_q_eig(H, cfg: SolverConfig | None = None) -> list[EigenPair]:
    """Q-eigenpairs ``H(., x^{d-1}) = lam conj(x)`` of a symmetric complex tensor."""
    T = as_tensor(H)
    _require(is_symmetric(T), "symmetric")
    return _solve(_QProblem(T), cfg or SolverConfig())


def c_form_value(F, x) -> float:
    """``F(conj(x)^d, x^d)``, real for CPS tensors."""
    T = as_tensor(F)
    d = T.ndim // 2
    x = np.asarray(x, dtype=complex)
    return float(contract_tail(T, [x.conj()] * d + [x] * d).real)


def g_form_value(G, x) -> float:
    T = as_tensor(G)
    x = np.asarray(x, dtype=complex)
    w = np.concatenate([x.conj(), x])
    return float(contract_tail(T, [w] * T.ndim).real)


# --------------------------------------------------------------------------
# relations between the eigen notions


@dataclass
class RelationReport:
    """Pairs checked in each direction with their worst residuals."""

    forward: list[tuple[float, float]] = field(default_factory=list)
    converse: list[tuple[float, float]] = field(default_factory=list)
    max_residual: float = 0.0

    def add(self, direction: str, lam: float, res: float):
        getattr(self, direction).append((lam, res))
        self.max_residual = max(self.max_residual, res)


def check_q_c_relation(H, cfg: SolverConfig | None = None) -> RelationReport:
    """Squared Q-eigenvalues of ``H`` are C-eigenvalues of ``conj(H) (x) H`` and back.

    A C-eigenpair ``(mu, x)`` with ``mu > tol`` is turned into a Q-eigenpair
    ``(sqrt(mu), x e^{-i theta/d})`` where ``theta = arg H(x,...,x)``.
    """
    cfg = cfg or SolverConfig()
    T = as_tensor(H)
    _require(is_symmetric(T), "symmetric")
    d = T.ndim
    F = outer_product(T.conj(), T)
    _require(is_cps(F), "conjugate partial-symmetric")
    report = RelationReport()
    for p in solve_q_eig(T, cfg):
        res = c_eig_residual(F, p.lam**2, p.x)
        report.add("forward", p.lam, res)
        if res > cfg.tol:
            raise RelationError(f"Q-eigenvalue {p.lam:.12g} does not square to a C-eigenvalue", p)
    for p in solve_c_eig(F, cfg):
        if p.lam <= cfg.tol:
            continue
        theta = np.angle(contract_tail(T, [p.x] * d))
        y = p.x * np.exp(-1j * theta / d)
        res = q_eig_residual(T, np.sqrt(p.lam), y, check=False)
        report.add("converse", p.lam, res)
        if res > cfg.tol:
            raise RelationError(f"C-eigenvalue {p.lam:.12g} has no matching Q-eigenpair", p)
    return report


def check_c_g_relation(F, cfg: SolverConfig | None = None) -> RelationReport:
    """C-eigenpairs ``(lam, x)`` of ``F`` solve the G-system of its CSS embedding at ``lam/2``, and back."""
    cfg = cfg or SolverConfig()
    T = as_tensor(F)
    _require(is_cps(T), "conjugate partial-symmetric")
    G = embed_cps_to_css(T)
    report = RelationReport()
    for p in solve_c_eig(T, cfg):
        res = g_eig_residual(G, p.lam / 2, p.x, check=False)
        report.add("forward", p.lam, res)
        if res > cfg.tol:
            raise RelationError(f"C-eigenvalue {p.lam:.12g} does not halve to a G-eigenvalue", p)
    for p in solve_g_eig(G, cfg):
        res = c_eig_residual(T, 2 * p.lam, p.x, check=False)
        report.add("converse", p.lam, res)
        if res > cfg.tol:
            raise RelationError(f"G-eigenvalue {p.lam:.12g} does not double to a C-eigenvalue", p)
    return report


# --------------------------------------------------------------------------
# brute-force oracle


def sphere_oracle(
    objective: Callable[[np.ndarray], float],
    n: int,
    samples: int = 10000,
    seed: int = 0,
    polish_steps: int = 200,
) -> tuple[float, np.ndarray]:
    """Best value of a real objective over random unit vectors, then polished.

    The polish is projected gradient ascent with central-difference
    gradients, accepting only improving steps, so the result is always a
    value attained on the sphere.
    """
    if samples < 1:
        raise ArgumentError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    X = random_unit_vectors(rng, samples, n)
    vals = np.array([objective(x) for x in X])
    x = X[int(np.argmax(vals))]
    best = float(vals.max())
    h, step = 1e-6, 0.1
    for _ in range(polish_steps):
        g = np.zeros(n, dtype=complex)
        for k in range(n):
            e = np.zeros(n, dtype=complex)
            e[k] = h
            g[k] = (objective(x + e) - objective(x - e)) / (2 * h)
            e[k] = 1j * h
            g[k] += 1j * (objective(x + e) - objective(x - e)) / (2 * h)
        g = g - np.vdot(x, g).real * x
        gn = np.linalg.norm(g)
        if gn < 1e-12:
            break
        y = x + step * g / gn
        y /= np.linalg.norm(y)
        v = objective(y)
        if v > best:
            x, best = y, float(v)
        else:
            step /= 2
            if step < 1e-12:
                break
    return best, x
