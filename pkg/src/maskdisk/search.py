"""Seeded quasi-random grids and multi-start local descent.

Two searches share this machinery: over rays of an input space (matching
marginals of masked states) and over block-diagonal unitaries (landing a
legal state inside a target subspace).
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import least_squares
from scipy.special import ndtri
from scipy.stats import qmc


def _sobol(dim: int, count: int, seed: int) -> np.ndarray:
    pts = qmc.Sobol(dim, scramble=True, seed=seed).random(count)
    return np.clip(pts, 1e-12, 1 - 1e-12)


def sphere_points(n: int, count: int, seed: int) -> np.ndarray:
    """``count`` unit vectors in C^n, rows; Gaussian-mapped Sobol points."""
    g = ndtri(_sobol(2 * n, count, seed))
    z = g[:, :n] + 1j * g[:, n:]
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def diverse_starts(points: np.ndarray, values: np.ndarray, count: int, overlap_cap: float = 0.99) -> list[int]:
    """Indices of up to ``count`` lowest-value points, skipping near-duplicates."""
    chosen: list[int] = []
    for i in np.argsort(values, kind="stable"):
        if all(abs(np.vdot(points[j], points[i])) < overlap_cap for j in chosen):
            chosen.append(int(i))
            if len(chosen) == count:
                break
    return chosen


def dedupe(states, weights=None, overlap: float = 1 - 1e-8) -> list[int]:
    """Indices of representatives, one per ray (fidelity above ``overlap`` merges)."""
    keep: list[int] = []
    order = range(len(states)) if weights is None else np.argsort(weights, kind="stable")
    for i in order:
        if all(abs(np.vdot(states[j], states[i])) <= overlap for j in keep):
            keep.append(int(i))
    return sorted(keep)


def _realify(z):
    return np.concatenate([z.real.ravel(), z.imag.ravel()])


def _complexify(x):
    half = x.size // 2
    return x[:half] + 1j * x[half:]


# -- input-space search -------------------------------------------------------


def marginal_deviation(v, dims, psis, rho_a, rho_b) -> np.ndarray:
    """Frobenius deviation of both masked marginals from the targets, batched over rows."""
    d_a, d_b = dims
    psis = np.atleast_2d(psis)
    mats = (psis @ np.asarray(v).T).reshape(-1, d_a, d_b)
    ra = np.einsum("nab,ncb->nac", mats, mats.conj())
    rb = np.einsum("nab,nac->nbc", mats, mats.conj())
    da = np.linalg.norm(ra - rho_a, axis=(1, 2))
    db = np.linalg.norm(rb - rho_b, axis=(1, 2))
    return np.sqrt(da**2 + db**2)


# Descent residuals avoid BLAS on tiny operands: its results can differ in the
# last bit with memory alignment, and descent along a flat valley amplifies that.


def _matvec(m, x):
    return (m * x[None, :]).sum(axis=1)


def _gram(m):
    """``m @ m^dagger`` by explicit products."""
    return (m[:, None, :] * m.conj()[None, :, :]).sum(axis=2)


def descend_marginals(v, dims, start, rho_a, rho_b):
    """Local least-squares descent of marginal mismatch from ``start``.

    Returns the normalized final input state and its deviation.
    """
    d_a, d_b = dims
    v = np.asarray(v)

    def residual(x):
        z = _complexify(x)
        psi = z / np.sqrt(np.sum(z.real**2 + z.imag**2))
        mat = _matvec(v, psi).reshape(d_a, d_b)
        ra = _gram(mat) - rho_a
        rb = _gram(mat.T) - rho_b
        return np.concatenate([_realify(ra), _realify(rb)])

    sol = least_squares(residual, _realify(np.asarray(start)), method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    z = _complexify(sol.x)
    psi = z / np.linalg.norm(z)
    return psi, float(np.linalg.norm(residual(sol.x)))


# -- block-unitary chart ------------------------------------------------------


def hermitian_basis(g: int) -> np.ndarray:
    """Orthonormal basis of g x g Hermitian matrices, shape (g*g, g, g)."""
    mats = []
    for k in range(g):
        m = np.zeros((g, g), dtype=complex)
        m[k, k] = 1
        mats.append(m)
    for k in range(g):
        for l in range(k + 1, g):
            m = np.zeros((g, g), dtype=complex)
            m[k, l] = m[l, k] = 1 / np.sqrt(2)
            mats.append(m)
            m = np.zeros((g, g), dtype=complex)
            m[k, l] = -1j / np.sqrt(2)
            m[l, k] = 1j / np.sqrt(2)
            mats.append(m)
    return np.array(mats)


class BlockUnitaryChart:
    """``x -> (+)_j expm(i H_j(x))`` for block sizes ``g``; surjective onto the block group."""

    def __init__(self, degeneracies):
        self.sizes = [int(g) for g in degeneracies]
        self.bases = [hermitian_basis(g) for g in self.sizes]
        self.dim = sum(g * g for g in self.sizes)
        self.d = sum(self.sizes)

    def unitaries(self, params) -> np.ndarray:
        params = np.atleast_2d(params)
        out = np.zeros((params.shape[0], self.d, self.d), dtype=complex)
        pos = off = 0
        for g, basis in zip(self.sizes, self.bases):
            h = np.einsum("nk,kab->nab", params[:, pos : pos + g * g], basis)
            w, vecs = np.linalg.eigh(h)
            out[:, off : off + g, off : off + g] = np.einsum("nak,nk,nbk->nab", vecs, np.exp(1j * w), vecs.conj())
            pos += g * g
            off += g
        return out


def haar_block_unitaries(degeneracies, count: int, seed: int) -> np.ndarray:
    """``count`` block-diagonal unitaries from Gaussian-mapped Sobol points, Haar per block."""
    sizes = [int(g) for g in degeneracies]
    d = sum(sizes)
    g = ndtri(_sobol(2 * sum(k * k for k in sizes), count, seed))
    out = np.zeros((count, d, d), dtype=complex)
    pos = off = 0
    for k in sizes:
        z = g[:, pos : pos + k * k] + 1j * g[:, pos + k * k : pos + 2 * k * k]
        q, r = np.linalg.qr(z.reshape(count, k, k))
        diag = np.diagonal(r, axis1=1, axis2=2)
        out[:, off : off + k, off : off + k] = q * (diag / np.abs(diag))[:, None, :]
        pos += 2 * k * k
        off += k
    return out


def span_residual_batch(unitaries, sqrt_lambda, projector_perp) -> np.ndarray:
    """Norm of the component of ``U (x) I |Psi_I>`` outside the target span, batched over ``U``."""
    psis = (unitaries * sqrt_lambda[None, None, :]).reshape(unitaries.shape[0], -1)
    return np.linalg.norm(psis @ projector_perp.T, axis=1)


def descend_span(chart: BlockUnitaryChart, sqrt_lambda, projector_perp, base):
    """Least-squares descent of the out-of-span component over ``base @ expm(i H(x))``.

    Starts at ``x = 0``; returns the final unitary and its residual.
    """

    def residual(x):
        u = (base[:, :, None] * chart.unitaries(x)[0][None, :, :]).sum(axis=1)
        return _realify(_matvec(projector_perp, (u * sqrt_lambda[None, :]).reshape(-1)))

    sol = least_squares(residual, np.zeros(chart.dim), method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    u = (base[:, :, None] * chart.unitaries(sol.x)[0][None, :, :]).sum(axis=1)
    return u, float(np.linalg.norm(residual(sol.x)))
