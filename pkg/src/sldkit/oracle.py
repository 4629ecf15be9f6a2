"""Spectral route to the SLD and the quantum Fisher information.

Works entirely in the eigenbasis of the state and never touches the
structure-constant machinery, so it serves as an independent cross-check of
the linear-system solver.  With rho = sum_i lambda_i |i><i|,

    L_ij = 2 <i|drho|j> / (lambda_i + lambda_j)   if lambda_i + lambda_j > tol
    L_ij = 0                                      otherwise

which is the minimum-norm representative, matching the solver's pseudo-inverse
convention.  The scalar Fisher information is
sum_ij 2 |<i|drho|j>|^2 / (lambda_i + lambda_j) over the kept pairs.
"""

from __future__ import annotations

import numpy as np

from .lie_basis import GeneratorBasis
from .sld_solver import DEFAULT_TOL, NumericalError, SLDSolution, _sld_residual
from .state_space import DensityState, TangentForm, _resolve_basis, expand


class KernelInconsistentError(NumericalError):
    """The tangent couples kernel directions the state cannot support."""


def _spectral_data(state: DensityState, form: TangentForm, tol: float):
    lam, vectors = np.linalg.eigh(state.matrix)
    dtil = vectors.conj().T @ form.matrix @ vectors
    pair_sums = lam[:, None] + lam[None, :]
    kept = pair_sums > tol
    blocked = np.abs(dtil) * (~kept)
    limit = tol * max(1.0, float(np.linalg.norm(form.matrix)))
    if blocked.max() > limit:
        i, j = np.unravel_index(np.argmax(blocked), blocked.shape)
        raise KernelInconsistentError(
            f"kernel-inconsistent tangent: <{i}|drho|{j}> = "
            f"{dtil[i, j]:.3e} but eigenvalue pair sum is "
            f"{pair_sums[i, j]:.3e}")
    return lam, vectors, dtil, pair_sums, kept


def sld_eigenbasis(state: DensityState, form: TangentForm,
                   tol: float = DEFAULT_TOL,
                   basis: GeneratorBasis | None = None) -> SLDSolution:
    """SLD from the eigendecomposition of the state.

    Matrix elements on eigenvalue pairs with lambda_i + lambda_j <= tol are
    set to zero; the returned gauge basis spans the Hermitian matrices
    supported on the kernel of the state.
    """
    basis = _resolve_basis(state.dimension, basis)
    lam, vectors, dtil, pair_sums, kept = _spectral_data(state, form, tol)
    Ltil = np.where(kept, 2.0 * dtil / np.where(kept, pair_sums, 1.0), 0.0)
    L = vectors @ Ltil @ vectors.conj().T
    L = 0.5 * (L + L.conj().T)

    kernel = [i for i in range(lam.size) if lam[i] <= 0.5 * tol]
    gauge = []
    for ai, a in enumerate(kernel):
        v = vectors[:, a]
        g = np.outer(v, v.conj())
        g = 0.5 * (g + g.conj().T)
        g.setflags(write=False)
        gauge.append(g)
        for b in kernel[ai + 1:]:
            w = vectors[:, b]
            g = (np.outer(v, w.conj()) + np.outer(w, v.conj())) / np.sqrt(2.0)
            g.setflags(write=False)
            gauge.append(g)
            g = (-1j * np.outer(v, w.conj()) + 1j * np.outer(w, v.conj())) / np.sqrt(2.0)
            g.setflags(write=False)
            gauge.append(g)

    coeff_identity, coeffs = expand(L, basis)
    residual = _sld_residual(state.matrix, form.matrix, L)
    L.setflags(write=False)
    coeffs.setflags(write=False)
    return SLDSolution(coeff_identity, coeffs, L, tuple(gauge), residual)


def qfi_eigenbasis(state: DensityState, form: TangentForm,
                   tol: float = DEFAULT_TOL) -> float:
    """Quantum Fisher information from the eigendecomposition of the state."""
    _, _, dtil, pair_sums, kept = _spectral_data(state, form, tol)
    terms = 2.0 * np.abs(dtil) ** 2 / np.where(kept, pair_sums, 1.0)
    return float(np.sum(terms[kept]))
