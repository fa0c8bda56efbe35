"""Ground states and low spectra of sparse Hermitian operators.

Dense LAPACK is used up to dimension 512; above that, implicitly
restarted Lanczos (ARPACK via scipy.sparse.linalg.eigsh) with a seeded
start vector so repeated runs are bit-reproducible.  Residuals are
verified after every solve.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

DENSE_CUTOFF = 512
RESIDUAL_TOL = 1e-10
DEGENERACY_TOL = 1e-8
START_VECTOR_SEED = 20240917


class ConvergenceError(RuntimeError):
    pass


@dataclass
class EigenResult:
    values: np.ndarray  # ascending
    vectors: np.ndarray  # columns
    residuals: np.ndarray
    degenerate: bool = False

    @property
    def ground_energy(self):
        return float(self.values[0])

    @property
    def ground_state(self):
        return self.vectors[:, 0]


def operator_norm_bound(h):
    """Cheap upper bound on the spectral norm (max absolute row sum)."""
    if sp.issparse(h):
        return float(abs(h).sum(axis=1).max())
    return float(np.abs(h).sum(axis=1).max())


def _verify(h, values, vectors, norm_bound):
    res = np.empty(values.size)
    for k in range(values.size):
        res[k] = np.linalg.norm(h @ vectors[:, k] - values[k] * vectors[:, k])
    tol = RESIDUAL_TOL * max(norm_bound, 1.0)
    if res.max() > tol:
        raise ConvergenceError(
            "eigenpair residual %.3e above %.3e (norm bound %.3e)" % (res.max(), tol, norm_bound)
        )
    return res


def low_spectrum(h, k):
    """k lowest eigenpairs, ascending, with verified residuals."""
    dim = h.shape[0]
    if not 1 <= k <= dim:
        raise ValueError("k=%d outside 1..%d" % (k, dim))
    norm_bound = operator_norm_bound(h)

    if dim <= DENSE_CUTOFF or k >= dim - 1:
        dense = h.toarray() if sp.issparse(h) else np.asarray(h)
        values, vectors = np.linalg.eigh(dense)
        values, vectors = values[:k], vectors[:, :k]
    else:
        rng = np.random.default_rng(START_VECTOR_SEED)
        v0 = rng.standard_normal(dim)
        try:
            values, vectors = spla.eigsh(
                h, k=k, which="SA", v0=v0, maxiter=10 * dim, tol=0
            )
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError("Lanczos did not converge: %s" % exc) from exc
        order = np.argsort(values)
        values, vectors = values[order], vectors[:, order]

    residuals = _verify(h, values, vectors, norm_bound)
    degenerate = values.size >= 2 and (values[1] - values[0]) < DEGENERACY_TOL * max(norm_bound, 1.0)
    return EigenResult(values=values, vectors=vectors, residuals=residuals, degenerate=degenerate)


def ground_state(h):
    """Lowest eigenpair; the degeneracy flag is set from the first gap."""
    dim = h.shape[0]
    result = low_spectrum(h, k=min(2, dim))
    return EigenResult(
        values=result.values[:1],
        vectors=result.vectors[:, :1],
        residuals=result.residuals[:1],
        degenerate=result.degenerate,
    )
