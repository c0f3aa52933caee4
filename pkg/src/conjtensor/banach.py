"""Symmetric versus multilinear maxima of complex forms.

Each checker computes a single-vector maximum (``lhs``) and the maximum of
the multilinear relaxation over independent unit vectors (``rhs``) and
reports the gap.  Both sides come from multistart local ascent, so an
``Equal`` verdict is numerical evidence, not a certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .bijection import is_flattening_psd
from .core import as_tensor, batch_contract_tail, is_cps, is_css, is_symmetric, tensor_norm
from .eigen import SolverConfig, random_unit_vectors, solve_c_eig, solve_g_eig, solve_q_eig
from .errors import ArgumentError, DegenerateRecovery, StructureError

TAU_EQ = 1e-6
TAU_BCA = 1e-10
PATTERNS = ("plain", "conj", "stacked")


@dataclass(frozen=True)
class AscentResult:
    """Best multistart block ascent run.

    ``trace`` lists the objective after every block update of the best start.
    """

    value: float
    blocks: tuple[np.ndarray, ...]
    converged: bool
    iters: int
    start_id: int
    trace: tuple[float, ...] = ()


@dataclass
class EqualityReport:
    lhs: float
    rhs: float
    gap: float
    verdict: str
    tol: float
    witnesses: dict = field(default_factory=dict)
    expected_equal: bool | None = None
    retried: bool = False
    recovered: np.ndarray | None = None
    recovered_value: float | None = None
    degenerate: bool = False

    @property
    def equal(self) -> bool:
        return self.verdict == "Equal"


def _argument(x: np.ndarray, flag: str) -> np.ndarray:
    if flag == "plain":
        return x
    if flag == "conj":
        return x.conj()
    return np.concatenate([x.conj(), x], axis=-1)


def _block_dims(T: np.ndarray, pattern: Sequence[str]) -> list[int]:
    dims = []
    for k, flag in enumerate(pattern):
        if flag not in PATTERNS:
            raise ArgumentError(f"unknown pattern flag {flag!r}")
        size = T.shape[k]
        if flag == "stacked":
            if size % 2:
                raise ArgumentError(f"mode {k} has odd size {size}, cannot hold a stacked (conj(x); x) argument")
            size //= 2
        dims.append(size)
    return dims


def multilinear_value(F, pattern: Sequence[str], blocks: Sequence[np.ndarray]) -> float:
    """``Re F(a_1,...,a_d)`` with each ``a_k`` built from ``blocks[k]`` per its flag."""
    T = as_tensor(F)
    args = [_argument(np.asarray(b, dtype=complex), f)[None, :] for b, f in zip(blocks, pattern)]
    return float(batch_contract_tail(T, args)[0].real)


def block_coordinate_ascent(
    F,
    pattern: Sequence[str],
    cfg: SolverConfig | None = None,
    init: Sequence[Sequence[np.ndarray]] | None = None,
    tol: float = TAU_BCA,
) -> AscentResult:
    """Maximize ``Re F(a_1,...,a_d)`` over unit blocks by exact block updates.

    Parameters
    ----------
    F : array_like
        Tensor of order d.
    pattern : sequence of {"plain", "conj", "stacked"}
        How block ``x_k`` enters mode k: as ``x_k``, ``conj(x_k)`` or the
        stacked vector ``(conj(x_k); x_k)``.
    cfg : SolverConfig, optional
        ``starts``, ``max_iters`` (sweeps) and ``seed`` are used.
    init : sequence of block lists, optional
        Extra starting points, run before the random ones.
    tol : float
        A start stops once a full sweep improves by less than ``tol``.
    """
    cfg = cfg or SolverConfig()
    T = as_tensor(F)
    if len(pattern) != T.ndim:
        raise ArgumentError(f"pattern has {len(pattern)} flags for an order-{T.ndim} tensor")
    dims = _block_dims(T, pattern)
    rng = np.random.default_rng(cfg.seed)
    blocks = [random_unit_vectors(rng, cfg.starts, m) for m in dims]
    if init:
        extra = [np.array([np.asarray(b[k], dtype=complex) / np.linalg.norm(b[k]) for b in init]) for k in range(T.ndim)]
        blocks = [np.concatenate([e, b]) for e, b in zip(extra, blocks)]
    S = blocks[0].shape[0]
    moved = [np.moveaxis(T, k, 0) for k in range(T.ndim)]

    def coeff(k: int) -> np.ndarray:
        others = [_argument(blocks[j], pattern[j]) for j in range(T.ndim) if j != k]
        if not others:
            return np.broadcast_to(moved[k], (S,) + moved[k].shape).copy()
        return batch_contract_tail(moved[k], others)

    value = np.full(S, -np.inf)
    traces: list[list[float]] = [[] for _ in range(S)]
    active = np.ones(S, dtype=bool)
    converged = np.zeros(S, dtype=bool)
    iters = np.zeros(S, dtype=int)
    for _ in range(cfg.max_iters):
        if not active.any():
            break
        before = value.copy()
        for k, flag in enumerate(pattern):
            c = coeff(k)
            m = dims[k]
            if flag == "plain":
                v = c.conj()
            elif flag == "conj":
                v = c
            else:
                v = c[:, :m] + c[:, m:].conj()
            norms = np.linalg.norm(v, axis=1)
            ok = active & (norms > 0)
            blocks[k][ok] = v[ok] / norms[ok, None]
            # value after the update: Re <coeff, argument>
            val = np.einsum("sj,sj->s", c, _argument(blocks[k], flag)).real
            value = np.where(active, val, value)
            for s in np.flatnonzero(active):
                traces[s].append(float(value[s]))
        iters[active] += 1
        done = active & (value - before < tol)
        converged |= done
        active &= ~done
    best = int(np.argmax(value))
    out = tuple(blocks[k][best].copy() for k in range(T.ndim))
    return AscentResult(
        multilinear_value(T, pattern, out),
        out,
        bool(converged[best]),
        int(iters[best]),
        best,
        tuple(traces[best]),
    )


def _verdict(lhs: float, rhs: float, tol: float) -> str:
    return "Equal" if abs(rhs - lhs) <= tol else "GapFound"


def _escalate(cfg: SolverConfig) -> SolverConfig:
    return replace(cfg, starts=4 * cfg.starts)


def _require(check, what: str):
    if not check:
        raise StructureError(f"tensor is not {what} ({check.reason})")


def check_css_banach(G, cfg: SolverConfig | None = None, tol: float = TAU_EQ) -> EqualityReport:
    """``max |G(w,...,w)|`` against ``max Re G(w_1,...,w_d)`` for a CSS tensor.

    ``w = (conj(x); x)`` with unit ``x``.  The left side is twice the
    largest absolute G-eigenvalue.
    """
    cfg = cfg or SolverConfig()
    T = as_tensor(G)
    _require(is_css(T), "conjugate super-symmetric")

    def run(c: SolverConfig):
        pairs = solve_g_eig(T, c)
        top, bottom = pairs[0], pairs[-1]
        if 2 * top.lam >= -2 * bottom.lam:
            lhs, wit = 2 * top.lam, top.x
        else:
            lhs, wit = -2 * bottom.lam, bottom.x
        asc = block_coordinate_ascent(T, ["stacked"] * T.ndim, c)
        return lhs, wit, asc

    lhs, wit, asc = run(cfg)
    retried = False
    if abs(asc.value - lhs) > tol:
        retried = True
        lhs2, wit2, asc2 = run(_escalate(cfg))
        if lhs2 > lhs:
            lhs, wit = lhs2, wit2
        if asc2.value > asc.value:
            asc = asc2
    return EqualityReport(
        lhs, asc.value, asc.value - lhs, _verdict(lhs, asc.value, tol), tol,
        {"lhs": wit, "rhs": asc.blocks}, True, retried,
    )


def hermitian_banach(Q, cfg: SolverConfig | None = None, tol: float = TAU_EQ, strict: bool = True) -> EqualityReport:
    """``max z^H Q z`` against ``max Re x^T Q y`` with recovery ``z = conj(x) + y``.

    When the recovery vector vanishes, block ascent is restarted once from a
    perturbed optimum.  If it still vanishes, :class:`DegenerateRecovery` is
    raised (``strict``) or the report is returned with ``degenerate=True``.
    """
    cfg = cfg or SolverConfig()
    A = as_tensor(Q)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise StructureError("expected a square matrix")
    _require(is_cps(A), "Hermitian")
    pairs = solve_c_eig(A, cfg)
    lhs, wit = pairs[0].lam, pairs[0].x
    asc = block_coordinate_ascent(A, ["plain", "plain"], cfg)

    def recover(blocks):
        z = blocks[0].conj() + blocks[1]
        nz = float(np.linalg.norm(z))
        return z, nz

    z, nz = recover(asc.blocks)
    if nz < 1e-8:
        rng = np.random.default_rng(cfg.seed + 1)
        init = [[b + 1e-3 * random_unit_vectors(rng, 1, b.size)[0] for b in asc.blocks]]
        again = block_coordinate_ascent(A, ["plain", "plain"], replace(cfg, starts=1), init=init)
        if again.value >= asc.value - tol:
            asc = again
            z, nz = recover(asc.blocks)
    report = EqualityReport(
        lhs, asc.value, asc.value - lhs, _verdict(lhs, asc.value, tol), tol,
        {"lhs": wit, "rhs": asc.blocks}, True,
    )
    if nz < 1e-8:
        report.degenerate = True
        if strict:
            raise DegenerateRecovery("conj(x*) + y* vanishes; no recovery vector", report)
        return report
    z = z / nz
    report.recovered = z
    report.recovered_value = float(np.vdot(z, A @ z).real)
    return report


def check_symmetric_complex_banach(F, cfg: SolverConfig | None = None, tol: float = TAU_EQ) -> EqualityReport:
    """``max Re F(x,...,x)`` against ``max Re F(x_1,...,x_d)`` for a symmetric tensor."""
    cfg = cfg or SolverConfig()
    T = as_tensor(F)
    _require(is_symmetric(T), "symmetric")

    def run(c):
        top = solve_q_eig(T, c)[0]
        return top.lam, top.x, block_coordinate_ascent(T, ["plain"] * T.ndim, c)

    lhs, wit, asc = run(cfg)
    retried = False
    if abs(asc.value - lhs) > tol:
        retried = True
        lhs2, wit2, asc2 = run(_escalate(cfg))
        if lhs2 > lhs:
            lhs, wit = lhs2, wit2
        if asc2.value > asc.value:
            asc = asc2
    return EqualityReport(
        lhs, asc.value, asc.value - lhs, _verdict(lhs, asc.value, tol), tol,
        {"lhs": wit, "rhs": asc.blocks}, True, retried,
    )


def _cps_pattern(T: np.ndarray) -> list[str]:
    d = T.ndim // 2
    return ["conj"] * d + ["plain"] * d


def check_cps_banach(F, cfg: SolverConfig | None = None, tol: float = TAU_EQ) -> EqualityReport:
    """``max F(conj(x)^d, x^d)`` against ``max Re F(conj(x_1),...,conj(x_d), x_{d+1},...,x_{2d})``.

    Equality is expected when the square flattening is PSD; otherwise the
    gap is only reported.
    """
    cfg = cfg or SolverConfig()
    T = as_tensor(F)
    _require(is_cps(T), "conjugate partial-symmetric")
    expected = is_flattening_psd(T)

    def run(c):
        top = solve_c_eig(T, c)[0]
        return top.lam, top.x, block_coordinate_ascent(T, _cps_pattern(T), c)

    lhs, wit, asc = run(cfg)
    retried = False
    if expected and abs(asc.value - lhs) > tol:
        retried = True
        lhs2, wit2, asc2 = run(_escalate(cfg))
        if lhs2 > lhs:
            lhs, wit = lhs2, wit2
        if asc2.value > asc.value:
            asc = asc2
    return EqualityReport(
        lhs, asc.value, asc.value - lhs, _verdict(lhs, asc.value, tol), tol,
        {"lhs": wit, "rhs": asc.blocks}, expected, retried,
    )


# --------------------------------------------------------------------------
# the intermediate two-vector problem


def _two_vector_value(T: np.ndarray, d: int, y: np.ndarray, z: np.ndarray) -> float:
    return float(batch_contract_tail(T, [y.conj()[None]] * d + [z[None]] * d)[0].real)


def _inner_ascent(T: np.ndarray, d: int, y: np.ndarray, z: np.ndarray, which: str, max_iters: int, tol: float):
    """Shifted power ascent of ``Re F(conj(y)^d, z^d)`` in one of the two vectors."""
    scale = max(2 * d * tensor_norm(T), 1e-300)
    gamma = 0.0
    val = _two_vector_value(T, d, y, z)
    for _ in range(max_iters):
        if which == "y":
            # d/d conj(y) of Re F(conj(y)^d, z^d) is proportional to F(., conj(y)^{d-1}, z^d)
            g = batch_contract_tail(T, [y.conj()[None]] * (d - 1) + [z[None]] * d)[0]
            cur = y
        else:
            g = np.moveaxis(T, -1, 0)
            g = batch_contract_tail(g, [y.conj()[None]] * d + [z[None]] * (d - 1))[0].conj()
            cur = z
        step = g + gamma * cur
        ns = np.linalg.norm(step)
        if ns == 0:
            break
        new = step / ns
        nv = _two_vector_value(T, d, new, z) if which == "y" else _two_vector_value(T, d, y, new)
        if nv < val - 1e-15 * scale:
            if gamma >= 2.0**10 * scale:
                break
            gamma = 2.0**-4 * scale if gamma == 0 else 2 * gamma
            continue
        gain = nv - val
        if which == "y":
            y = new
        else:
            z = new
        val = nv
        if gain < tol:
            break
    return y, z, val


@dataclass(frozen=True)
class SandwichResult:
    left: float
    middle: float
    right: float
    chain_ok: bool
    collapsed: bool
    tol: float


def sandwich_check(F, cfg: SolverConfig | None = None, tol: float = TAU_EQ) -> SandwichResult:
    """Single-vector, two-vector and fully multilinear maxima of a CPS form.

    ``left = max F(conj(x)^d, x^d)``, ``middle = max Re F(conj(y)^d, z^d)``,
    ``right`` is the block ascent value.  ``chain_ok`` states
    ``left <= middle <= right`` within ``tol``; ``collapsed`` states that all
    three agree within ``tol``.
    """
    cfg = cfg or SolverConfig()
    T = as_tensor(F)
    _require(is_cps(T), "conjugate partial-symmetric")
    d = T.ndim // 2
    top = solve_c_eig(T, cfg)[0]
    asc = block_coordinate_ascent(T, _cps_pattern(T), cfg)
    rng = np.random.default_rng(cfg.seed + 7)
    starts = [(top.x, top.x), (asc.blocks[0], asc.blocks[d])]
    R = random_unit_vectors(rng, 2 * max(1, cfg.starts // 4), T.shape[0])
    starts += list(zip(R[0::2], R[1::2]))
    middle = -np.inf
    for y, z in starts:
        val = _two_vector_value(T, d, y, z)
        for _ in range(cfg.max_iters):
            y, z, _v = _inner_ascent(T, d, y, z, "y", 200, TAU_BCA)
            y, z, nv = _inner_ascent(T, d, y, z, "z", 200, TAU_BCA)
            if nv - val < TAU_BCA:
                val = max(val, nv)
                break
            val = nv
        middle = max(middle, val)
    left, right = top.lam, asc.value
    chain = left <= middle + tol and middle <= right + tol
    collapsed = max(left, middle, right) - min(left, middle, right) <= tol
    return SandwichResult(left, float(middle), right, chain, collapsed, tol)
