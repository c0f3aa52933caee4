"""Maps between conjugate forms and their tensor representations.

``S`` sends a partial-symmetric tensor in C^{n^{2d}} to the symmetric
conjugate form ``F(conj(x),...,conj(x), x,...,x)``.  ``G`` sends a symmetric
tensor in C^{(2n)^d} to the general conjugate form ``F(w,...,w)`` with the
stacked vector ``w = (conj(x); x)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import (
    TAU_SYM,
    as_tensor,
    is_cps,
    is_partial_symmetric,
    is_symmetric,
    outer_product,
    shift_conjugate,
    symmetrize,
    tensor_norm,
)
from .errors import ArgumentError, InternalError, StructureError
from .forms import ConjugatePolynomial, MonomialKey, classify_form, multiset_permutations
from .linalg import hermitian_eig

TAU_DEC = 1e-9


def _orbit(idx: tuple[int, ...]) -> set[tuple[int, ...]]:
    return set(itertools.permutations(idx))


def s_forward(F, tol: float = TAU_SYM) -> ConjugatePolynomial:
    """Symmetric conjugate form of a partial-symmetric tensor."""
    T = as_tensor(F)
    check = is_partial_symmetric(T, tol)
    if not check:
        raise StructureError(f"tensor is not partial-symmetric ({check.reason})")
    n, d = T.shape[0], T.ndim // 2
    terms = {}
    for I in itertools.combinations_with_replacement(range(n), d):
        wI = multiset_permutations(I)
        for J in itertools.combinations_with_replacement(range(n), d):
            c = T[I + J]
            if c != 0:
                key = MonomialKey(tuple(i + 1 for i in I), tuple(j + 1 for j in J))
                terms[key] = c * wI * multiset_permutations(J)
    return ConjugatePolynomial(n, terms)


def s_inverse(p: ConjugatePolynomial, d: int | None = None) -> np.ndarray:
    """Partial-symmetric tensor of a symmetric conjugate form of degree 2d.

    ``d`` is only needed for the zero polynomial, whose degree is undefined.
    """
    cls = classify_form(p)
    if p.is_zero():
        if d is None:
            raise ArgumentError("the zero polynomial needs an explicit half-degree d")
    elif cls.kind != "symmetric_conjugate":
        raise StructureError(f"expected a symmetric conjugate form, got {cls.kind}")
    else:
        if d is not None and d != cls.degree:
            raise StructureError(f"form has half-degree {cls.degree}, not {d}")
        d = cls.degree
    if d < 1:
        raise StructureError("a symmetric conjugate form needs degree at least 2")
    n = p.n
    T = np.zeros((n,) * (2 * d), dtype=complex)
    for key, c in p.terms.items():
        I = tuple(i - 1 for i in key.conj)
        J = tuple(j - 1 for j in key.plain)
        val = c / (multiset_permutations(I) * multiset_permutations(J))
        for a in _orbit(I):
            for b in _orbit(J):
                T[a + b] = val
    return T


def g_forward(F, tol: float = TAU_SYM) -> ConjugatePolynomial:
    """General conjugate form of a symmetric tensor over dimension 2n."""
    T = as_tensor(F)
    check = is_symmetric(T, tol)
    if not check:
        raise StructureError(f"tensor is not symmetric ({check.reason})")
    if T.shape[0] % 2:
        raise StructureError("the G map needs an even dimension 2n")
    n, d = T.shape[0] // 2, T.ndim
    terms = {}
    for J in itertools.combinations_with_replacement(range(2 * n), d):
        c = T[J]
        if c != 0:
            conj = tuple(j + 1 for j in J if j < n)
            plain = tuple(j - n + 1 for j in J if j >= n)
            terms[MonomialKey(conj, plain)] = c * multiset_permutations(J)
    return ConjugatePolynomial(n, terms)


def g_inverse(p: ConjugatePolynomial, d: int | None = None) -> np.ndarray:
    """Symmetric tensor in C^{(2n)^d} representing a homogeneous conjugate form.

    Index ``i`` (1..n) of a slot binds ``conj(x_i)`` and index ``n+i`` binds
    ``x_i``.  For a real-valued form the result is conjugate super-symmetric.
    """
    degrees = {k.degree for k in p.terms}
    if p.is_zero():
        if d is None:
            raise ArgumentError("the zero polynomial needs an explicit degree d")
    elif len(degrees) != 1:
        raise StructureError(f"expected a homogeneous form, got degrees {sorted(degrees)}")
    else:
        deg = degrees.pop()
        if d is not None and d != deg:
            raise StructureError(f"form has degree {deg}, not {d}")
        d = deg
    if d < 1:
        raise StructureError("a general conjugate form needs degree at least 1")
    n = p.n
    T = np.zeros((2 * n,) * d, dtype=complex)
    for key, c in p.terms.items():
        J = tuple(i - 1 for i in key.conj) + tuple(j - 1 + n for j in key.plain)
        val = c / multiset_permutations(J)
        for a in _orbit(J):
            T[a] = val
    return T


def css_project(G) -> np.ndarray:
    """Nearest conjugate super-symmetric tensor to a symmetric ``G``.

    Two symmetric tensors induce the same general conjugate form iff their
    difference is annihilated here when the form is real-valued, so this is
    the canonical representative used for comparisons.
    """
    T = as_tensor(G)
    if T.shape[0] % 2:
        raise StructureError("css_project needs an even dimension 2n")
    return (T + shift_conjugate(T)) / 2


def flatten_square(F) -> np.ndarray:
    """Group the front half of the modes into rows and the back half into columns."""
    T = as_tensor(F)
    if T.ndim % 2:
        raise StructureError("square flattening needs an even order")
    if len(set(T.shape)) != 1:
        raise StructureError(f"square flattening needs equal dimensions, got {T.shape}")
    m = T.shape[0] ** (T.ndim // 2)
    return T.reshape(m, m)


@dataclass(frozen=True)
class CpsDecomposition:
    """``F = sum_k alphas[k] * conj(H_k) (x) H_k`` with unit-norm symmetric ``H_k``."""

    alphas: np.ndarray
    components: tuple[np.ndarray, ...]
    residual: float

    def reconstruct(self) -> np.ndarray:
        if not self.components:
            return np.zeros(0, dtype=complex)
        out = np.zeros(self.components[0].shape * 2, dtype=complex)
        for a, H in zip(self.alphas, self.components):
            out += a * outer_product(H.conj(), H)
        return out


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    if abs(v.flat[k]) == 0:
        return v
    return v * (abs(v.flat[k]) / v.flat[k])


def _require_cps(F, tol: float) -> np.ndarray:
    T = as_tensor(F)
    check = is_cps(T, tol)
    if not check:
        raise StructureError(f"tensor is not conjugate partial-symmetric ({check.reason})")
    return T


def cps_decompose(F, tol: float = TAU_DEC, sym_tol: float = TAU_SYM) -> CpsDecomposition:
    """Split a CPS tensor into weighted ``conj(H) (x) H`` terms via its Hermitian flattening.

    Components are ordered by decreasing weight.  Each one is unit-norm with
    its largest-modulus entry real positive.
    """
    T = _require_cps(F, sym_tol)
    n, d = T.shape[0], T.ndim // 2
    M = flatten_square(T)
    w, V = hermitian_eig(M)
    scale = max(1.0, float(np.linalg.norm(M)))
    alphas, comps = [], []
    for k in np.argsort(-w, kind="stable"):
        a = float(w[k])
        if abs(a) <= tol:
            continue
        H = V[:, k].conj().reshape((n,) * d)
        # eigenvector error grows like eps*||M||/|alpha|
        allowed = sym_tol * max(1.0, scale / abs(a))
        check = is_symmetric(H, allowed)
        if not check:
            raise InternalError(f"component for alpha={a:.3g} is not symmetric (violation {check.violation:.3g})")
        H = symmetrize(H)
        H = _canonical_phase(H / tensor_norm(H))
        alphas.append(a)
        comps.append(H)
    dec = CpsDecomposition(np.array(alphas, dtype=float), tuple(comps), 0.0)
    recon = dec.reconstruct() if comps else np.zeros_like(T)
    return CpsDecomposition(dec.alphas, dec.components, tensor_norm(recon - T))


def is_flattening_psd(F, tol: float = TAU_DEC, sym_tol: float = TAU_SYM) -> bool:
    """True iff the Hermitian square flattening has no eigenvalue below ``-tol``."""
    T = _require_cps(F, sym_tol)
    w, _ = hermitian_eig(flatten_square(T))
    return bool(w[0] >= -tol)


def embed_cps_to_css(F, tol: float = TAU_SYM) -> np.ndarray:
    """CSS tensor ``G`` over C^{(2n)^{2d}} with ``G(w,...,w) = F(conj(x)^d, x^d)``.

    The CPS tensor is placed in the (front = first n, back = last n) block
    and symmetrized, which spreads each entry evenly over its C(2d, d)
    placements.
    """
    T = _require_cps(F, tol)
    n, order = T.shape[0], T.ndim
    d = order // 2
    big = np.zeros((2 * n,) * order, dtype=complex)
    big[(slice(0, n),) * d + (slice(n, 2 * n),) * d] = T
    return symmetrize(big)

