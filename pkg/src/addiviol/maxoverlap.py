"""Maximal and average overlap of product states with a projector.

For a subspace with projector P, the largest squared Schmidt coefficient of any
vector in the subspace equals ``sup <a (x) b| P |a (x) b>`` over product states.
The supremum is approached by a seesaw: with ``b`` fixed the objective is a
quadratic form in ``a`` maximized by a top eigenvector, and vice versa. Every
half-step can only increase the objective, so the iteration converges to a
stationary point; multiple random restarts guard against local maxima. The
returned value is therefore a lower bound on the supremum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._parallel import parallel_map
from .subspace import Subspace
from .tensor import PureState, haar_random_states, is_projector, make_rng

DEGENERACY_GAP = 1e-12
MONOTONE_SLACK = 1e-12


@dataclass
class OverlapResult:
    value: float
    witness_a: PureState
    witness_b: PureState
    iterations: int
    converged: bool
    restart: int = 0
    history: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    def product_vector(self) -> np.ndarray:
        return np.kron(self.witness_a.vec, self.witness_b.vec)


def _projector_basis(P, d_A: int, d_B: int) -> np.ndarray:
    """Orthonormal columns spanning the range of ``P`` (a projector or a Subspace)."""
    if isinstance(P, Subspace):
        if (P.d_A, P.d_B) != (d_A, d_B):
            raise ValueError("subspace dimensions do not match d_A, d_B")
        return P.basis
    P = np.asarray(P)
    n = d_A * d_B
    if P.shape != (n, n):
        raise ValueError(f"projector shape {P.shape} does not match {d_A}x{d_B}")
    if not is_projector(P, atol=1e-8):
        raise ValueError("input is not a Hermitian idempotent projector")
    w, U = np.linalg.eigh((P + P.conj().T) / 2)
    return U[:, w > 0.5]


def _top_eigvec(M: np.ndarray, prev: np.ndarray) -> np.ndarray:
    w, U = np.linalg.eigh(M)
    top = U[:, w >= w[-1] - DEGENERACY_GAP]
    if top.shape[1] > 1:
        # degenerate top eigenspace: stay as close to the previous iterate as possible
        c = top.conj().T @ prev
        nrm = np.linalg.norm(c)
        if nrm > 1e-8:
            return top @ (c / nrm)
    return U[:, -1]


def _objective(X: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    amp = np.einsum("a,kab,b->k", a.conj(), X, b.conj())
    return float(np.vdot(amp, amp).real)


def _seesaw(X, a, b, tol, max_iter, callback):
    """Alternate top-eigenvector updates; ``X`` is (k, d_A, d_B)."""
    history = []
    best = -math.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        v = X @ b.conj()  # rows X_i conj(b)
        a = _top_eigvec(v.T @ v.conj(), a)
        history.append(_objective(X, a, b))
        if callback is not None:
            callback(a, b, history[-1])
        u = np.einsum("a,kab->kb", a.conj(), X)
        b = _top_eigvec(u.T @ u.conj(), b)
        val = _objective(X, a, b)
        history.append(val)
        if callback is not None:
            callback(a, b, val)
        if val - best < tol:
            converged = True
            best = max(best, val)
            break
        best = val
    history = np.asarray(history)
    if np.any(np.diff(history) < -MONOTONE_SLACK):
        raise RuntimeError("seesaw objective decreased; eigen-solver failure")
    return a, b, history, it, converged


def max_product_overlap(
    P,
    d_A: int,
    d_B: int,
    restarts: int = 32,
    tol: float = 1e-10,
    max_iter: int = 1000,
    seed: int = 0,
    callback: Callable | None = None,
) -> OverlapResult:
    """Largest ``<a (x) b|P|a (x) b>`` found by multi-start seesaw.

    ``P`` is a projector matrix on C^dA (x) C^dB or a :class:`Subspace`.
    Restart ``r`` is initialized from Haar-random product states drawn with
    seed ``seed + r``. ``callback(a, b, value)`` sees every half-step.
    """
    if restarts < 1:
        raise ValueError("restarts must be positive")
    Q = _projector_basis(P, d_A, d_B)
    if Q.shape[1] == 0:
        raise ValueError("projector is zero")
    X = Q.T.reshape(-1, d_A, d_B)

    def run(r):
        rng = make_rng(seed + r)
        a0 = haar_random_states(d_A, 1, rng)[0]
        b0 = haar_random_states(d_B, 1, rng)[0]
        return _seesaw(X, a0, b0, tol, max_iter, callback)

    # callbacks observe runs in order, so keep them sequential
    runs = [run(r) for r in range(restarts)] if callback else parallel_map(run, range(restarts))
    vals = [_objective(X, a, b) for a, b, *_ in runs]
    r = int(np.argmax(vals))
    a, b, history, it, converged = runs[r]
    return OverlapResult(
        value=vals[r],
        witness_a=PureState(a, (d_A,)),
        witness_b=PureState(b, (d_B,)),
        iterations=it,
        converged=converged,
        restart=r,
        history=history,
    )


def subspace_lambda_max(s: Subspace, **opts) -> OverlapResult:
    """Largest squared Schmidt coefficient over vectors of ``s`` (lower bound, by seesaw)."""
    return max_product_overlap(s, s.d_A, s.d_B, **opts)


def average_product_overlap(P, d_A: int, d_B: int) -> float:
    """Exact Haar average of ``<a (x) b|P|a (x) b>``, i.e. rank(P) / (d_A d_B)."""
    if isinstance(P, Subspace):
        return P.k / (d_A * d_B)
    return float(np.trace(np.asarray(P)).real) / (d_A * d_B)


def sample_product_overlaps(P, d_A: int, d_B: int, num: int, seed=None) -> np.ndarray:
    """Overlaps of ``num`` independent Haar-random product states with ``P``."""
    Q = _projector_basis(P, d_A, d_B)
    rng = make_rng(seed)
    a = haar_random_states(d_A, num, rng)
    b = haar_random_states(d_B, num, rng)
    prod = np.einsum("na,nb->nab", a, b).reshape(num, -1)
    amp = prod @ Q.conj()
    return np.einsum("nk,nk->n", amp, amp.conj()).real


def multipartite_max_product_overlap(
    P, dims: Sequence[int], cut: Sequence[int], **opts
) -> OverlapResult:
    """Seesaw across the grouped cut ``cut : rest`` of a multi-factor space.

    ``P`` is a projector on the full space (factors ordered as ``dims``) or a
    matrix whose orthonormal columns span its range. Each side's state is
    unconstrained over its grouped factors. Witnesses carry the grouped dims.
    """
    dims = [int(x) for x in dims]
    cut = [int(x) for x in cut]
    rest = [i for i in range(len(dims)) if i not in cut]
    if not cut or not rest or len(set(cut)) != len(cut) or any(not 0 <= i < len(dims) for i in cut):
        raise ValueError(f"invalid cut {cut} for {len(dims)} factors")
    total = int(np.prod(dims))
    if isinstance(P, Subspace):
        Q = P.basis
    else:
        P = np.asarray(P)
        if P.ndim != 2 or P.shape[0] != total:
            raise ValueError(f"operator of shape {P.shape} does not act on dims {dims}")
        Q = P if P.shape[1] != total else _projector_basis(P, total, 1)
    if Q.shape[0] != total:
        raise ValueError(f"subspace of dimension {Q.shape[0]} does not match dims {dims}")
    k = Q.shape[1]
    grouped = Q.T.reshape([k] + dims).transpose([0] + [1 + i for i in cut + rest]).reshape(k, -1)
    DA = int(np.prod([dims[i] for i in cut]))
    DB = total // DA
    res = max_product_overlap(Subspace(DA, DB, grouped.T), DA, DB, **opts)
    res.witness_a = PureState(res.witness_a.vec, tuple(dims[i] for i in cut))
    res.witness_b = PureState(res.witness_b.vec, tuple(dims[i] for i in rest))
    return res
