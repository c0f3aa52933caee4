"""Dense complex tensors: evaluation, contraction, symmetry tests and projections.

Tensors are plain ``numpy`` arrays of dtype ``complex128``.  Mode indices in
the Python API are 0-based like numpy axes; entry indices reported in
diagnostics are 1-based.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ArgumentError, DimensionError

TAU_SYM = 1e-10


def as_tensor(F) -> np.ndarray:
    """Validate ``F`` and return it as a complex array of order >= 1."""
    T = np.asarray(F, dtype=complex)
    if T.ndim < 1:
        raise DimensionError("a tensor needs at least one mode")
    if 0 in T.shape:
        raise DimensionError(f"every dimension must be positive, got {T.shape}")
    if not np.all(np.isfinite(T)):
        raise ArgumentError("tensor entries must be finite")
    return T


def _as_vector(x, n: int, what: str) -> np.ndarray:
    v = np.asarray(x, dtype=complex)
    if v.ndim != 1 or v.shape[0] != n:
        raise DimensionError(f"{what}: expected a vector of length {n}, got shape {v.shape}")
    return v


def multilinear_eval(F, args: Sequence) -> complex:
    """Evaluate the multilinear form ``sum F[i1..id] x1[i1] ... xd[id]``."""
    T = as_tensor(F)
    if len(args) != T.ndim:
        raise DimensionError(f"expected {T.ndim} argument vectors, got {len(args)}")
    vecs = [_as_vector(x, T.shape[k], f"argument {k + 1}") for k, x in enumerate(args)]
    for v in reversed(vecs):
        T = T @ v
    return complex(T)


def partial_eval(F, args) -> np.ndarray | complex:
    """Contract the listed modes of ``F`` with vectors.

    Parameters
    ----------
    F : array_like
        Tensor of order d.
    args : iterable of (int, array_like)
        Pairs ``(mode, vector)`` with 0-based, pairwise distinct modes.

    Returns
    -------
    ndarray or complex
        The tensor over the remaining modes, in their original order.  A
        scalar is returned when every mode is contracted.
    """
    T = as_tensor(F)
    pairs = list(args)
    modes = [m for m, _ in pairs]
    if len(set(modes)) != len(modes):
        raise ArgumentError(f"repeated mode in {modes}")
    for m in modes:
        if not 0 <= m < T.ndim:
            raise ArgumentError(f"mode {m} out of range for an order-{T.ndim} tensor")
    # highest mode first so lower axis numbers stay valid
    for m, x in sorted(pairs, key=lambda p: -p[0]):
        v = _as_vector(x, T.shape[m], f"mode {m}")
        T = np.tensordot(T, v, axes=([m], [0]))
    if T.ndim == 0:
        return complex(T)
    return T


def contract_tail(T: np.ndarray, vecs: Sequence[np.ndarray]) -> np.ndarray:
    """Contract the trailing modes of ``T`` with ``vecs`` (last vector binds last mode).

    No validation; used in solver inner loops.
    """
    for v in reversed(vecs):
        T = T @ v
    return T


def batch_contract_tail(T: np.ndarray, vecs: Sequence[np.ndarray], batched: bool = False) -> np.ndarray:
    """Batched :func:`contract_tail`.

    Each entry of ``vecs`` has shape ``(S, n)``.  If ``batched`` is False, ``T``
    carries no batch axis yet; the result always has a leading batch axis.
    """
    vecs = list(vecs)
    if not vecs:
        if batched:
            return T
        raise ArgumentError("need at least one vector to create the batch axis")
    if not batched:
        T = np.tensordot(vecs[-1], T, axes=([1], [T.ndim - 1]))
        vecs = vecs[:-1]
    for v in reversed(vecs):
        T = np.einsum("s...j,sj->s...", T, v)
    return T


def _canonical_positions(shape: tuple[int, ...], groups: Sequence[tuple[int, int]]) -> np.ndarray:
    """Flat position of the representative (indices sorted within each group) of every entry."""
    idx = np.indices(shape).reshape(len(shape), -1)
    for lo, hi in groups:
        idx[lo:hi] = np.sort(idx[lo:hi], axis=0)
    return np.ravel_multi_index(tuple(idx), shape)


def _make_exact(T: np.ndarray, groups: Sequence[tuple[int, int]]) -> np.ndarray:
    # summation order differs between permuted entries; copy one value per orbit
    return T.ravel()[_canonical_positions(T.shape, groups)].reshape(T.shape)


def symmetrize(F) -> np.ndarray:
    """Average ``F`` over all permutations of its modes."""
    T = as_tensor(F)
    if len(set(T.shape)) != 1:
        raise DimensionError(f"symmetrize needs equal dimensions, got {T.shape}")
    d = T.ndim
    out = np.zeros_like(T)
    for perm in itertools.permutations(range(d)):
        out += np.transpose(T, perm)
    return _make_exact(out / math.factorial(d), [(0, d)])


def partial_symmetrize(F) -> np.ndarray:
    """Average an order-2d tensor over permutations inside each half of its modes."""
    T = as_tensor(F)
    if T.ndim % 2 or len(set(T.shape)) != 1:
        raise DimensionError(f"partial_symmetrize needs even order and equal dims, got {T.shape}")
    d = T.ndim // 2
    out = np.zeros_like(T)
    for p1 in itertools.permutations(range(d)):
        for p2 in itertools.permutations(range(d, 2 * d)):
            out += np.transpose(T, p1 + p2)
    return _make_exact(out / math.factorial(d) ** 2, [(0, d), (d, 2 * d)])


@dataclass(frozen=True)
class SymmetryCheck:
    """Outcome of a symmetry predicate; truthy iff the identity holds.

    ``reason`` is a machine-readable code and ``index`` the 1-based entry of
    the largest violation, both ``None`` on success.
    """

    ok: bool
    reason: str | None = None
    index: tuple[int, ...] | None = None
    violation: float = 0.0

    def __bool__(self) -> bool:
        return self.ok


def _compare(T: np.ndarray, other: np.ndarray, tol: float, reason: str) -> SymmetryCheck | None:
    diff = np.abs(T - other)
    worst = float(diff.max()) if diff.size else 0.0
    if worst > tol:
        idx = np.unravel_index(int(np.argmax(diff)), T.shape)
        return SymmetryCheck(False, reason, tuple(int(i) + 1 for i in idx), worst)
    return None


def _first_failure(*checks) -> SymmetryCheck:
    for check in checks:
        if check is not None:
            return check
    return SymmetryCheck(True)


def _transposition(d: int, k: int) -> list[int]:
    perm = list(range(d))
    perm[k], perm[k + 1] = perm[k + 1], perm[k]
    return perm


def _check_within(T: np.ndarray, lo: int, hi: int, tol: float, reason: str) -> SymmetryCheck | None:
    # adjacent transpositions generate the permutation group of modes lo..hi-1
    for k in range(lo, hi - 1):
        bad = _compare(T, np.transpose(T, _transposition(T.ndim, k)), tol, reason)
        if bad is not None:
            return bad
    return None


def is_symmetric(F, tol: float = TAU_SYM) -> SymmetryCheck:
    T = np.asarray(F, dtype=complex)
    if T.ndim < 1 or len(set(T.shape)) != 1:
        return SymmetryCheck(False, "unequal_dims")
    return _first_failure(_check_within(T, 0, T.ndim, tol, "not_symmetric"))


def is_partial_symmetric(F, tol: float = TAU_SYM) -> SymmetryCheck:
    T = np.asarray(F, dtype=complex)
    if T.ndim < 2 or T.ndim % 2:
        return SymmetryCheck(False, "odd_order")
    if len(set(T.shape)) != 1:
        return SymmetryCheck(False, "unequal_dims")
    d = T.ndim // 2
    front = _check_within(T, 0, d, tol, "front_not_symmetric")
    if front is not None:
        return front
    return _first_failure(_check_within(T, d, 2 * d, tol, "back_not_symmetric"))


def swap_halves(F: np.ndarray) -> np.ndarray:
    """Transpose an order-2d tensor so the back d modes come first."""
    d = F.ndim // 2
    return np.transpose(F, list(range(d, 2 * d)) + list(range(d)))


def is_cps(F, tol: float = TAU_SYM) -> SymmetryCheck:
    """Conjugate partial-symmetry: partial symmetry plus ``F[I,J] = conj(F[J,I])``."""
    check = is_partial_symmetric(F, tol)
    if not check:
        return check
    T = np.asarray(F, dtype=complex)
    return _first_failure(_compare(T, swap_halves(T).conj(), tol, "not_conjugate_pair"))


def shift_conjugate(F: np.ndarray) -> np.ndarray:
    """Conjugate of ``F`` with every index shifted by half the dimension (mod 2n)."""
    n = F.shape[0] // 2
    return np.roll(F, n, axis=tuple(range(F.ndim))).conj()


def is_css(F, tol: float = TAU_SYM) -> SymmetryCheck:
    """Conjugate super-symmetry over an even dimension 2n."""
    T = np.asarray(F, dtype=complex)
    if T.ndim < 1 or len(set(T.shape)) != 1:
        return SymmetryCheck(False, "unequal_dims")
    if T.shape[0] % 2:
        return SymmetryCheck(False, "odd_dimension")
    check = is_symmetric(T, tol)
    if not check:
        return check
    return _first_failure(_compare(T, shift_conjugate(T), tol, "not_shift_conjugate"))


def tensor_norm(F) -> float:
    T = np.asarray(F, dtype=complex)
    return float(np.sqrt(np.sum((T.conj() * T).real)))


def outer_product(A, B) -> np.ndarray:
    """Tensor product with entries ``A[i...] * B[j...]``."""
    return np.multiply.outer(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))
