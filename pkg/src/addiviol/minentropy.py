"""Minimum output Renyi entropy of channels and analytic bounds around it.

The minimization runs over unit input vectors by projected gradient descent on
the sphere (retraction by renormalization, step halved on failure) from many
starting points. Any value it returns is attained by an explicit input, so it
is an upper bound on the true minimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import parallel_map
from .maxoverlap import subspace_lambda_max
from .renyi import DEFAULT_RANK_EPS, binary_entropy, parse_order, rank_eps, renyi_entropy
from .subspace import Channel, Subspace, channel_from_subspace
from .tensor import PureState, haar_random_states, make_rng, normalize_spectrum

LN2 = math.log(2)
SUPPORT_EPS = 1e-14
# auxiliary order whose minimizers seed the p = 0 rank search
RANK_SEARCH_ORDER = 2.0


@dataclass
class MinEntropyResult:
    p: float
    value: float
    argmin: PureState
    spectrum_at_argmin: np.ndarray
    restarts_used: int
    converged: bool = True


def default_restarts(p: float) -> int:
    return 64 if p < 1 else 32


def _outputs(K: np.ndarray, x: np.ndarray):
    y = K @ x  # (m, d_out)
    rho = y.T @ y.conj()
    return y, rho


def output_spectrum(channel, x: np.ndarray) -> np.ndarray:
    """Normalized output spectrum of ``channel`` on the pure input ``x``."""
    _, rho = _outputs(channel.kraus(), np.asarray(x))
    return normalize_spectrum(np.linalg.eigvalsh((rho + rho.conj().T) / 2))


def _value_and_grad(K, x, p):
    """S_p of the normalized output and its gradient with respect to conj(x)."""
    y, rho = _outputs(K, x)
    t = float(np.trace(rho).real)
    w, U = np.linalg.eigh((rho + rho.conj().T) / (2 * t))
    w = np.clip(w, 0, None)
    pos = w > SUPPORT_EPS
    Us, ws = U[:, pos], w[pos]
    if math.isinf(p):
        val = -math.log2(w[-1])
        G = -np.outer(U[:, -1], U[:, -1].conj()) / (w[-1] * LN2)
    elif p == 1:
        val = float(-np.sum(ws * np.log2(ws)))
        G = -(Us * (np.log2(ws) + 1 / LN2)) @ Us.conj().T
    else:
        T = float(np.sum(ws**p))
        val = math.log2(T) / (1 - p)
        G = (Us * (ws ** (p - 1))) @ Us.conj().T * (p / ((1 - p) * T * LN2))
    tr = np.einsum("ij,ji->", G, (rho / t)).real
    D = (G - tr * np.eye(G.shape[0])) / t
    grad = np.einsum("mij,mi->j", K.conj(), y @ D.T)
    return val, grad


def _descend(K, x, p, tol, max_iter):
    x = x / np.linalg.norm(x)
    val, g = _value_and_grad(K, x, p)
    step = 0.5
    converged = False
    for _ in range(max_iter):
        g = g - x * np.vdot(x, g).real
        gnorm = np.linalg.norm(g)
        if gnorm < 1e-12:
            converged = True
            break
        while step > 1e-16:
            cand = x - step * g
            cand /= np.linalg.norm(cand)
            cval, cg = _value_and_grad(K, cand, p)
            if cval < val:
                break
            step /= 2
        else:
            converged = True  # no descent direction left at machine precision
            break
        gain = val - cval
        x, val, g = cand, cval, cg
        step = min(step * 2, 4.0)
        if gain < tol:
            converged = True
            break
    return x, val, converged


def _warm_starts(channel, seed) -> list[np.ndarray]:
    """Inputs mapped closest to the best product vector of the channel's subspace."""
    if not isinstance(channel, Channel):
        return []
    res = subspace_lambda_max(channel.subspace, seed=seed)
    x = channel.isometry.conj().T @ res.product_vector()
    return [x / np.linalg.norm(x)]


def _random_starts(d_in, restarts, seed):
    return [haar_random_states(d_in, 1, make_rng(seed + r))[0] for r in range(restarts)]


def _finish(channel, p, x, restarts_used, converged, eps):
    x = x / np.linalg.norm(x)
    spec = output_spectrum(channel, x)
    return MinEntropyResult(
        p=p,
        value=renyi_entropy(spec, p, eps),
        argmin=PureState(x, (x.size,)),
        spectrum_at_argmin=spec,
        restarts_used=restarts_used,
        converged=converged,
    )


def min_output_renyi(
    channel,
    p,
    restarts: int | None = None,
    tol: float = 1e-10,
    max_iter: int = 1000,
    seed: int = 0,
    eps: float = DEFAULT_RANK_EPS,
    starts=None,
) -> MinEntropyResult:
    """Smallest output S_p found over pure inputs.

    ``channel`` is a :class:`Channel` or any object exposing ``kraus()`` as a
    ``(m, d_out, d_in)`` array (outputs are renormalized, so trace-decreasing
    maps are allowed). For p = inf on a subspace channel the seesaw is used;
    for p = 0 the smallest output rank (entries above ``eps``) among random,
    warm and locally optimized inputs is reported. ``starts`` adds extra
    initial inputs ahead of the random ones.
    """
    p = parse_order(p)
    if restarts is None:
        restarts = default_restarts(p)
    K = channel.kraus()
    d_in = K.shape[2]

    if math.isinf(p) and isinstance(channel, Channel):
        res = subspace_lambda_max(channel.subspace, restarts=restarts, tol=tol, max_iter=max_iter, seed=seed)
        x = channel.isometry.conj().T @ res.product_vector()
        return _finish(channel, p, x, restarts, res.converged, eps)

    inits = [np.asarray(s, dtype=np.complex128) for s in (starts or [])]
    inits += _warm_starts(channel, seed)
    inits += _random_starts(d_in, restarts, seed)

    if p == 0:
        # rank is piecewise constant: inspect the starts and their purity-optimized descendants
        polished = parallel_map(lambda x0: _descend(K, x0, RANK_SEARCH_ORDER, tol, max_iter)[0], inits)
        cands = inits + polished
        ranks = [rank_eps(output_spectrum(channel, x), eps) for x in cands]
        i = int(np.argmin(ranks))
        return _finish(channel, p, cands[i], len(inits), True, eps)

    runs = parallel_map(lambda x0: _descend(K, x0, p, tol, max_iter), inits)
    vals = [v for _, v, _ in runs]
    i = int(np.argmin(vals))  # argmin keeps the earliest start on ties
    x, _, converged = runs[i]
    return _finish(channel, p, x, len(inits), converged, eps)


def screen_subspace(s: Subspace, p, **opts) -> MinEntropyResult:
    """Minimum entanglement (Renyi-p of the B reduction) over vectors of ``s``."""
    return min_output_renyi(channel_from_subspace(s), p, **opts)


def antisym_min_entropy_bound(d: int, p=None) -> float:
    """Certified lower bound on output S_p of the antisymmetric channel: 1 bit for every p.

    Every antisymmetric vector has largest squared Schmidt coefficient at most
    1/2, so its spectrum is majorized by (1/2, 1/2).
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    if p is not None:
        parse_order(p)
    return 1.0


def vn_violation_condition(D: int, d: int) -> float:
    """Left side of 2(1 - d/D^2) log2 D + h(d/D^2) < 2, in bits."""
    if not 1 <= d <= D * D:
        raise ValueError(f"need 1 <= d <= D^2, got D={D}, d={d}")
    x = d / (D * D)
    return 2 * (1 - x) * math.log2(D) + binary_entropy(x)
