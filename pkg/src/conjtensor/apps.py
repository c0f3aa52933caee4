"""Best rank-one approximation and radar ambiguity shaping."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .banach import block_coordinate_ascent
from .bijection import s_inverse
from .core import as_tensor, is_cps, outer_product, partial_symmetrize, symmetrize, tensor_norm
from .eigen import SolverConfig, solve_c_eig, solve_g_eig, solve_q_eig
from .errors import ArgumentError, StructureError
from .forms import ConjugatePolynomial, MonomialKey


# --------------------------------------------------------------------------
# rank-one approximation


@dataclass(frozen=True)
class RankOneResult:
    """``scale * factors[0] (x) ... (x) factors[-1]`` approximates ``F``.

    ``objective`` is ``Re <z^1 (x) ... (x) z^d, F>`` and equals ``scale``.
    """

    factors: tuple[np.ndarray, ...]
    scale: float
    objective: float
    residual: float
    converged: bool


def _rank_one_tensor(factors) -> np.ndarray:
    out = factors[0]
    for z in factors[1:]:
        out = outer_product(out, z)
    return out


def rank_one_als(F, cfg: SolverConfig | None = None) -> RankOneResult:
    """Best rank-one approximation by alternating exact block updates.

    Block ascent maximizes ``Re F(y^1,...,y^d)`` over unit blocks; the
    factors are ``z^k = conj(y^k)`` so that the objective is the inner
    product ``<z^1 (x) ... (x) z^d, F>``.
    """
    cfg = cfg or SolverConfig()
    T = as_tensor(F)
    if tensor_norm(T) == 0:
        raise ArgumentError("the zero tensor has no best rank-one direction")
    asc = block_coordinate_ascent(T, ["plain"] * T.ndim, cfg)
    factors = [b.conj() for b in asc.blocks]
    value = asc.value
    if value < 0:
        factors[0] = -factors[0]
        value = -value
    residual = tensor_norm(value * _rank_one_tensor(factors) - T)
    return RankOneResult(tuple(factors), value, value, residual, asc.converged)


def stacked_symmetric_tensor(F) -> np.ndarray:
    """Symmetric ``H`` over C^N, N = sum(dims), with ``H(z,...,z) = F(z^1,...,z^d)``.

    ``z`` stacks the blocks ``z^1,...,z^d``.
    """
    T = as_tensor(F)
    offsets = np.concatenate([[0], np.cumsum(T.shape)])
    N = int(offsets[-1])
    big = np.zeros((N,) * T.ndim, dtype=complex)
    big[tuple(slice(offsets[k], offsets[k + 1]) for k in range(T.ndim))] = T
    return symmetrize(big)


def embed_rank_one_as_geig(F) -> np.ndarray:
    """CSS tensor ``G`` with ``max G(w,...,w) = max Re F(z^1,...,z^d)`` over unit blocks.

    ``G`` holds ``c*conj(H)`` on the all-conjugate block and ``c*H`` on the
    all-plain block, ``c = sqrt(d^d)/2``.  Its largest G-eigenvalue is half
    the rank-one objective.
    """
    T = as_tensor(F)
    H = stacked_symmetric_tensor(T)
    d, N = H.ndim, H.shape[0]
    c = np.sqrt(float(d) ** d) / 2
    G = np.zeros((2 * N,) * d, dtype=complex)
    G[(slice(0, N),) * d] = c * H.conj()
    G[(slice(N, 2 * N),) * d] = c * H
    return G


def rank_one_value_via_geig(F, cfg: SolverConfig | None = None) -> float:
    """Rank-one objective computed as twice the largest G-eigenvalue of the embedding."""
    pairs = solve_g_eig(embed_rank_one_as_geig(F), cfg or SolverConfig())
    return 2 * pairs[0].lam


def rank_one_relaxed_value(F, cfg: SolverConfig | None = None) -> float:
    """Maximum of ``Re F(z^1,...,z^d)`` under the single constraint ``sum ||z^k||^2 = d``.

    Computed as ``d^{d/2}`` times the largest Q-eigenvalue of the stacked
    symmetric tensor.
    """
    H = stacked_symmetric_tensor(F)
    d = H.ndim
    return float(d) ** (d / 2) * solve_q_eig(H, cfg or SolverConfig())[0].lam


# --------------------------------------------------------------------------
# radar


@dataclass(frozen=True)
class Scatterer:
    lag: int
    doppler: float
    tolerance: float
    power: float


@dataclass(frozen=True)
class RadarScenario:
    """Code length ``n``, ``m`` Doppler bins, interfering scatterers, noise
    power, reference code and similarity penalty."""

    n: int
    m: int
    scatterers: tuple[Scatterer, ...]
    noise: float
    reference: np.ndarray
    penalty: float

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ArgumentError("code length and bin count must be positive")
        ref = np.asarray(self.reference, dtype=complex)
        if ref.shape != (self.n,):
            raise ArgumentError(f"reference code must have length {self.n}")
        object.__setattr__(self, "reference", ref)
        object.__setattr__(self, "scatterers", tuple(self.scatterers))
        if self.noise < 0 or self.penalty < 0:
            raise ArgumentError("noise and penalty must be nonnegative")
        for k, sc in enumerate(self.scatterers):
            if not 0 <= sc.lag < self.n:
                raise ArgumentError(f"scatterer {k + 1}: lag {sc.lag} outside 0..{self.n - 1}")
            if not -0.5 <= sc.doppler < 0.5:
                raise ArgumentError(f"scatterer {k + 1}: Doppler {sc.doppler} outside [-1/2, 1/2)")
            if sc.tolerance < 0 or sc.power < 0:
                raise ArgumentError(f"scatterer {k + 1}: tolerance and power must be nonnegative")
            if not doppler_bins(sc, self.m):
                raise ArgumentError(f"scatterer {k + 1}: no Doppler bin intersects its interval")

    @classmethod
    def from_dict(cls, doc: dict) -> "RadarScenario":
        ref = doc.get("reference")
        if ref is None:
            ref = np.ones(doc["n"])
        else:
            ref = np.array([complex(z["re"], z["im"]) for z in ref])
        return cls(
            n=int(doc["n"]),
            m=int(doc["m"]),
            scatterers=tuple(
                Scatterer(int(s["lag"]), float(s["doppler"]), float(s.get("tolerance", 0.0)), float(s["power"]))
                for s in doc.get("scatterers", [])
            ),
            noise=float(doc.get("noise", 0.0)),
            reference=ref,
            penalty=float(doc.get("penalty", 0.0)),
        )


def build_shift_matrix(r: int, n: int) -> np.ndarray:
    """``J^r`` with ones where row - column = r."""
    if n < 1 or not 0 <= r <= n - 1:
        raise ArgumentError(f"shift {r} outside 0..{n - 1}")
    return np.eye(n, k=-r)


def steering_vector(v: float, n: int) -> np.ndarray:
    return np.exp(2j * np.pi * v * np.arange(n))


def bin_frequency(j: int, m: int) -> float:
    return -0.5 + j / m


def doppler_bins(sc: Scatterer, m: int) -> list[int]:
    """Bins ``j`` in 1..m whose half-open cell meets the closed Doppler interval.

    Cell ``j = 0`` is the same frequency as ``j = m`` and is folded onto it.
    """
    lo, hi = sc.doppler - sc.tolerance / 2, sc.doppler + sc.tolerance / 2
    hits = set()
    for j in range(m + 1):
        x = bin_frequency(j, m)
        left, right = x - 1 / (2 * m), x + 1 / (2 * m)
        if left <= hi and lo < right:
            hits.add(m if j == 0 else j)
    return sorted(hits)


def radar_weights(sc: RadarScenario) -> np.ndarray:
    """Weights ``w[r, j-1]`` summing ``power/|bins|`` over scatterers at lag r hitting bin j."""
    W = np.zeros((sc.n, sc.m))
    for s in sc.scatterers:
        bins = doppler_bins(s, sc.m)
        for j in bins:
            W[s.lag, j - 1] += s.power / len(bins)
    return W


def _lag_doppler_matrix(r: int, v: float, n: int) -> np.ndarray:
    return build_shift_matrix(r, n) * steering_vector(v, n)[None, :]


def disturbance_tensor(sc: RadarScenario) -> np.ndarray:
    """CPS tensor of ``phi(s) = sum w(r,j) |s^H J^r (s * p(x_j))|^2``."""
    n = sc.n
    U = np.zeros((n,) * 4, dtype=complex)
    W = radar_weights(sc)
    for r, j in zip(*np.nonzero(W)):
        M = _lag_doppler_matrix(int(r), bin_frequency(int(j) + 1, sc.m), n)
        # |s^H M s|^2 = sum conj(s_b) conj(s_c) s_a s_d conj(M[a,b]) M[c,d]
        U += W[r, j] * np.einsum("ab,cd->bcad", M.conj(), M)
    return partial_symmetrize(U)


def penalty_polynomial(sc: RadarScenario) -> ConjugatePolynomial:
    """``|s^H s0|^2 ||s||^2`` as a symmetric conjugate quartic."""
    s0 = sc.reference
    pairs = []
    for i in range(sc.n):
        for j in range(sc.n):
            c = s0[i] * s0[j].conjugate()
            if c == 0:
                continue
            for k in range(sc.n):
                pairs.append((MonomialKey.make((i + 1, k + 1), (j + 1, k + 1)), c))
    return ConjugatePolynomial.from_terms(sc.n, pairs)


def build_radar_objective(sc: RadarScenario) -> np.ndarray:
    """CPS tensor of ``phi(s) - 4 rho |s^H s0|^2 ||s||^2``.

    On the sphere, ``(s^H s0 + s0^H s)^2 = 4 Re(s^H s0)^2`` reaches
    ``4 |s^H s0|^2`` after a phase rotation of ``s`` that leaves ``phi``
    unchanged, so both objectives share the same minimum value.
    """
    T = disturbance_tensor(sc)
    if sc.penalty:
        T = T - 4 * sc.penalty * s_inverse(penalty_polynomial(sc), d=2)
    if not is_cps(T):
        raise StructureError("radar objective failed the conjugate partial-symmetry check")
    return T


def ambiguity(s: np.ndarray, r: int, v: float) -> float:
    """``|s^H J^r (s * p(v))|^2 / ||s||^2``."""
    s = np.asarray(s, dtype=complex)
    h = np.vdot(s, _lag_doppler_matrix(r, v, s.size) @ s)
    return float(abs(h) ** 2 / np.vdot(s, s).real)


def disturbance_power(sc: RadarScenario, s: np.ndarray) -> float:
    """``phi(s)`` from the scenario weights (no noise term)."""
    s = np.asarray(s, dtype=complex)
    W = radar_weights(sc)
    norm2 = float(np.vdot(s, s).real)
    return float(sum(W[r, j] * ambiguity(s, int(r), bin_frequency(int(j) + 1, sc.m)) * norm2 for r, j in zip(*np.nonzero(W))))


def model_objective(sc: RadarScenario, s: np.ndarray) -> float:
    """``phi(s) - rho (s^H s0 + s0^H s)^2 ||s||^2`` evaluated directly."""
    s = np.asarray(s, dtype=complex)
    t = 2 * np.vdot(s, sc.reference).real
    return disturbance_power(sc, s) - sc.penalty * t * t * float(np.vdot(s, s).real)


@dataclass(frozen=True)
class AmbiguityRow:
    r: int
    j: int
    x_j: float
    weight: float
    value: float


@dataclass(frozen=True)
class RadarSolution:
    code: np.ndarray
    objective: float
    disturbance: float
    tensor_value: float
    report: tuple[AmbiguityRow, ...] = field(default_factory=tuple)

    def report_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "j", "x_j", "weight", "value"])
        for row in self.report:
            w.writerow([row.r, row.j, f"{row.x_j:.12g}", f"{row.weight:.12g}", f"{row.value:.12g}"])
        return buf.getvalue()


def solve_radar(sc: RadarScenario, cfg: SolverConfig | None = None) -> RadarSolution:
    """Minimize the radar objective on the unit sphere via the smallest C-eigenvalue.

    The returned code is rotated so that ``s^H s0`` is real and positive
    (when nonzero).  ``disturbance`` adds the noise power to ``phi``.
    """
    cfg = cfg or SolverConfig()
    T = build_radar_objective(sc)
    best = solve_c_eig(-T, cfg)[0]
    s = best.x
    inner = np.vdot(s, sc.reference)
    if abs(inner) > 0:
        s = s * (inner / abs(inner))
    W = radar_weights(sc)
    rows = tuple(
        AmbiguityRow(r, j, bin_frequency(j, sc.m), float(W[r, j - 1]), ambiguity(s, r, bin_frequency(j, sc.m)))
        for r in range(sc.n)
        for j in range(1, sc.m + 1)
    )
    return RadarSolution(
        s,
        model_objective(sc, s),
        disturbance_power(sc, s) + sc.noise,
        -best.lam,
        rows,
    )
