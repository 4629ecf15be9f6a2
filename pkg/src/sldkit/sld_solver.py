"""Linear-system solver for the symmetric logarithmic derivative (SLD).

Expanding ``drho = 1/2 {rho, L}`` on the generator basis turns the implicit
definition of the SLD into n**2 linear equations for the n**2 unknown
coefficients (L_id, L_1, ..., L_{n^2-1}):

    D_id = rho_id L_id + (2/n) sum_j rho_j L_j
    D_l  = rho_l L_id + rho_id L_l + sum_{j,k} rho_k L_j f_kjl

with f the symmetric structure constants.  For full-rank states the system is
uniquely solvable; on rank-deficient states the solution is fixed only up to
Hermitian matrices anticommuting with rho (the gauge subspace), and the solver
returns the minimum-Frobenius-norm representative together with a
Frobenius-orthonormal basis of the gauge subspace.

Closed forms for two- and three-level systems at a diagonal base point
decouple into SU(2) blocks:

    L_l = 2 D_l / (k_a + k_b)

for the off-diagonal pair generator l coupling levels a and b.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lie_basis import GeneratorBasis, StructureConstants, matrix_to_pairs
from .state_space import (DensityState, MixingWeights, TangentForm,
                          _resolve_basis, base_point, expand, reconstruct)

DEFAULT_TOL = 1e-10


class NumericalError(Exception):
    """Numerical failure (inconsistency, degeneracy), as opposed to bad usage."""


class InconsistentSystemError(NumericalError):
    """The right-hand side has a component outside the operator range."""


class DegenerateWeightsError(NumericalError):
    """Weights are repeated or vanish where a closed form needs them distinct."""


class NonTangentFormError(NumericalError):
    """The supplied form is not tangent to the orbit the operation assumes."""


@dataclass(frozen=True, eq=False)
class SLDSystem:
    """Assembled linear system M x = d over (L_id, L_1, ..., L_{n^2-1})."""

    matrix: np.ndarray
    rhs: np.ndarray
    dimension: int
    diagonal_indices: tuple

    def diagonal_block(self) -> np.ndarray:
        """Sub-block over the identity and diagonal-generator slots.

        At a diagonal base point this block decouples from the off-diagonal
        unknowns; its determinant is prod_i k_i for n = 2, 3 and vanishes
        exactly when the state is rank deficient.
        """
        idx = [0] + [i + 1 for i in self.diagonal_indices]
        return self.matrix[np.ix_(idx, idx)]


@dataclass(frozen=True, eq=False)
class SLDSolution:
    """An SLD representative with its gauge subspace and residual.

    ``gauge_basis`` is a Frobenius-orthonormal tuple of Hermitian matrices X
    with {X, rho} = 0; it is empty for full-rank states.  ``residual`` is
    ||drho - 1/2 {rho, L}||_F.
    """

    coeff_identity: float
    coeffs: np.ndarray
    matrix: np.ndarray
    gauge_basis: tuple
    residual: float

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def gauge_dim(self) -> int:
        return len(self.gauge_basis)

    def to_json_dict(self) -> dict:
        return {
            "L_identity": float(self.coeff_identity),
            "L": [float(v) for v in self.coeffs],
            "matrix": matrix_to_pairs(self.matrix),
            "gauge_dim": int(self.gauge_dim),
            "residual": float(self.residual),
        }


def _frobenius_weights(n: int) -> np.ndarray:
    # Tr(X^2) = n x_id^2 + 2 sum_k x_k^2 for X = x_id 1 + sum x_k t_k
    w = np.full(n * n, np.sqrt(2.0))
    w[0] = np.sqrt(float(n))
    return w


def _sld_residual(state_matrix: np.ndarray, form_matrix: np.ndarray,
                  L: np.ndarray) -> float:
    recon = 0.5 * (state_matrix @ L + L @ state_matrix)
    return float(np.linalg.norm(form_matrix - recon))


def _finalize(coeff_identity: float, coeffs: np.ndarray,
              state_matrix: np.ndarray, form_matrix: np.ndarray,
              gauge: tuple, basis: GeneratorBasis) -> SLDSolution:
    coeffs = np.asarray(coeffs, dtype=float).copy()
    L = reconstruct(coeff_identity, coeffs, basis)
    residual = _sld_residual(state_matrix, form_matrix, L)
    L.setflags(write=False)
    coeffs.setflags(write=False)
    return SLDSolution(float(coeff_identity), coeffs, L, tuple(gauge), residual)


def assemble(state: DensityState, form: TangentForm,
             constants: StructureConstants) -> SLDSystem:
    """Assemble the n^2 x n^2 system M x = d for the SLD coefficients."""
    n = state.dimension
    if form.dimension != n or constants.dimension != n:
        raise ValueError(
            f"dimension mismatch: state {n}, form {form.dimension}, "
            f"constants {constants.dimension}")
    m = n * n - 1
    rho_id = state.coeff_identity
    rho = state.coeffs
    M = np.zeros((n * n, n * n))
    M[0, 0] = rho_id
    M[0, 1:] = (2.0 / n) * rho
    M[1:, 0] = rho
    M[1:, 1:] = rho_id * np.eye(m) + np.einsum(
        "k,kjl->lj", rho, constants.f.to_dense())
    rhs = np.concatenate(([form.coeff_identity], form.coeffs))
    M.setflags(write=False)
    rhs.setflags(write=False)
    return SLDSystem(M, rhs, n, tuple(constants.diagonal_indices))


def solve(system: SLDSystem, state: DensityState, tol: float = DEFAULT_TOL,
          basis: GeneratorBasis | None = None) -> SLDSolution:
    """Solve the assembled system for the SLD coefficients.

    Full-rank states give the unique solution with an empty gauge basis.
    Rank-deficient states give the minimum-Frobenius-norm representative via
    a rank-revealing SVD with singular-value cutoff ``tol * sigma_max``; the
    null space, mapped back through the generator expansion, spans the
    Hermitian matrices anticommuting with rho.

    Raises
    ------
    InconsistentSystemError
        If the right-hand side has a component outside the range of M
        exceeding ``tol`` (relative to max(1, ||d||)); this signals a form
        that is not tangent where the state is rank deficient, e.g. a
        trace-changing direction with no transversal handling.
    """
    n = system.dimension
    if state.dimension != n:
        raise ValueError("state dimension does not match system")
    basis = _resolve_basis(n, basis)
    weights = _frobenius_weights(n)
    scaled = system.matrix / weights  # column scaling: unknowns y = w * x
    u, s, vh = np.linalg.svd(scaled)
    smax = float(s[0]) if s.size else 0.0
    rank = int(np.count_nonzero(s > tol * smax)) if smax > 0.0 else 0
    rhs = system.rhs
    if rank:
        y = vh[:rank].T @ ((u[:, :rank].T @ rhs) / s[:rank])
    else:
        y = np.zeros(n * n)
    x = y / weights

    misfit = float(np.linalg.norm(system.matrix @ x - rhs))
    if misfit > tol * max(1.0, float(np.linalg.norm(rhs))):
        raise InconsistentSystemError(
            f"inconsistent system: rhs component outside the operator range "
            f"(misfit {misfit:.3e}); the form is not tangent at this state")

    # vh rows are orthonormal in the scaled coordinates, so the mapped
    # matrices are already Frobenius-orthonormal.
    gauge = []
    for row in vh[rank:]:
        g = row / weights
        gmat = reconstruct(g[0], g[1:], basis)
        gmat.setflags(write=False)
        gauge.append(gmat)

    form_matrix = reconstruct(rhs[0], rhs[1:], basis)
    return _finalize(x[0], x[1:], state.matrix, form_matrix, gauge, basis)


def _check_orbit_tangency(form: TangentForm, diagonal_indices, tol: float):
    worst = abs(form.coeff_identity)
    for i in diagonal_indices:
        worst = max(worst, abs(form.coeffs[i]))
    if worst > tol:
        raise NonTangentFormError(
            f"non-tangent form: diagonal components must vanish for a "
            f"closed-form orbit solution (max {worst:.3e})")


def closed_form_u2(weights: MixingWeights, form: TangentForm,
                   tol: float = DEFAULT_TOL) -> SLDSolution:
    """Two-level closed form L = (2/(k1+k2)) (D_1 t_1 + D_2 t_2).

    Requires a mixed diagonal state (k1, k2 > 0) and an orbit-tangent form;
    pure states are delegated to the general solver.
    """
    basis = _resolve_basis(2, None)
    if form.dimension != 2 or weights.dimension != 2:
        raise ValueError("closed_form_u2 applies to two-level systems only")
    k1, k2 = weights.values
    if k1 <= 0.0 or k2 <= 0.0:
        raise DegenerateWeightsError(
            "closed_form_u2 requires strictly positive weights; "
            "use the general solver for pure states")
    _check_orbit_tangency(form, basis.diagonal_indices, tol)
    coeffs = np.zeros(3)
    coeffs[0] = 2.0 * form.coeffs[0] / (k1 + k2)
    coeffs[1] = 2.0 * form.coeffs[1] / (k1 + k2)
    state = base_point(weights, basis)
    return _finalize(0.0, coeffs, state.matrix, form.matrix, (), basis)


def closed_form_u3(weights: MixingWeights, form: TangentForm,
                   tol: float = DEFAULT_TOL) -> SLDSolution:
    """Three-level closed form at a full-rank diagonal base point.

    The system splits into three SU(2) blocks coupling level pairs
    (1,2), (1,3), (2,3):

        L_{1,2} = 2 D_{1,2} / (k1 + k2)
        L_{4,5} = 2 D_{4,5} / (k1 + k3)
        L_{6,7} = 2 D_{6,7} / (k2 + k3)

    Repeated or zero weights are rejected (those cases are delegated to the
    general solver or the dedicated degenerate forms).
    """
    basis = _resolve_basis(3, None)
    if form.dimension != 3 or weights.dimension != 3:
        raise ValueError("closed_form_u3 applies to three-level systems only")
    k1, k2, k3 = weights.values
    if min(k1, k2, k3) <= 1e-12:
        raise DegenerateWeightsError("closed_form_u3 requires full-rank weights")
    if min(abs(k1 - k2), abs(k1 - k3), abs(k2 - k3)) <= 1e-12:
        raise DegenerateWeightsError("closed_form_u3 requires distinct weights")
    _check_orbit_tangency(form, basis.diagonal_indices, tol)
    D = form.coeffs
    coeffs = np.zeros(8)
    coeffs[0] = 2.0 * D[0] / (k1 + k2)
    coeffs[1] = 2.0 * D[1] / (k1 + k2)
    coeffs[3] = 2.0 * D[3] / (k1 + k3)
    coeffs[4] = 2.0 * D[4] / (k1 + k3)
    coeffs[5] = 2.0 * D[5] / (k2 + k3)
    coeffs[6] = 2.0 * D[6] / (k2 + k3)
    state = base_point(weights, basis)
    return _finalize(0.0, coeffs, state.matrix, form.matrix, (), basis)


def closed_form_u3_rank2(weights: MixingWeights, form: TangentForm,
                         tol: float = DEFAULT_TOL) -> SLDSolution:
    """Three-level closed form for rank-2 weights (k1, k2, 0).

        L_{1,2} = 2 D_{1,2} / (k1 + k2)
        L_{4,5} = 2 D_{4,5} / k1
        L_{6,7} = 2 D_{6,7} / k2

    The representative has no diagonal components; the one-dimensional gauge
    subspace is spanned by diag(0, 0, 1).
    """
    basis = _resolve_basis(3, None)
    if form.dimension != 3 or weights.dimension != 3:
        raise ValueError("closed_form_u3_rank2 applies to three-level systems only")
    k1, k2, k3 = weights.values
    if abs(k3) > 1e-12:
        raise ValueError(f"closed_form_u3_rank2 requires k3 = 0, got {k3!r}")
    if k1 <= 0.0 or k2 <= 0.0:
        raise DegenerateWeightsError(
            "closed_form_u3_rank2 requires k1, k2 > 0")
    _check_orbit_tangency(form, basis.diagonal_indices, tol)
    D = form.coeffs
    coeffs = np.zeros(8)
    coeffs[0] = 2.0 * D[0] / (k1 + k2)
    coeffs[1] = 2.0 * D[1] / (k1 + k2)
    coeffs[3] = 2.0 * D[3] / k1
    coeffs[4] = 2.0 * D[4] / k1
    coeffs[5] = 2.0 * D[5] / k2
    coeffs[6] = 2.0 * D[6] / k2
    gauge = _kernel_gauge_basis(weights.values)
    state = base_point(weights, basis)
    return _finalize(0.0, coeffs, state.matrix, form.matrix, gauge, basis)


def closed_form_u3_degenerate(weights: MixingWeights, form: TangentForm,
                              tol: float = DEFAULT_TOL) -> SLDSolution:
    """Three-level closed form for degenerate weights (k1, k2, k2).

    Orbit tangency forces D_6 = D_7 = 0 (the (2,3) directions collapse when
    k2 = k3); L_6 = L_7 = 0 is chosen as the minimum-norm representative.
    The state stays full rank, so there are no diagonal components and no
    gauge freedom.
    """
    basis = _resolve_basis(3, None)
    if form.dimension != 3 or weights.dimension != 3:
        raise ValueError(
            "closed_form_u3_degenerate applies to three-level systems only")
    k1, k2, k3 = weights.values
    if abs(k2 - k3) > 1e-12:
        raise ValueError(
            f"closed_form_u3_degenerate requires k2 = k3, got {k2!r}, {k3!r}")
    if k2 <= 0.0:
        raise DegenerateWeightsError(
            "closed_form_u3_degenerate requires k2 = k3 > 0")
    if abs(k1 - k2) <= 1e-12:
        raise DegenerateWeightsError(
            "maximally degenerate weights: use the general solver")
    D = form.coeffs
    if max(abs(D[5]), abs(D[6])) > tol:
        raise NonTangentFormError(
            f"non-tangent form: D_6, D_7 must vanish on the k2 = k3 orbit "
            f"(got {D[5]!r}, {D[6]!r})")
    _check_orbit_tangency(form, basis.diagonal_indices, tol)
    coeffs = np.zeros(8)
    coeffs[0] = 2.0 * D[0] / (k1 + k2)
    coeffs[1] = 2.0 * D[1] / (k1 + k2)
    coeffs[3] = 2.0 * D[3] / (k1 + k2)
    coeffs[4] = 2.0 * D[4] / (k1 + k2)
    state = base_point(weights, basis)
    return _finalize(0.0, coeffs, state.matrix, form.matrix, (), basis)


def _kernel_gauge_basis(weight_values: np.ndarray) -> tuple:
    """Frobenius-orthonormal Hermitian basis of the anticommutant of diag(k).

    {X, diag(k)} = 0 forces X_ij (k_i + k_j) = 0, so X is supported on the
    kernel indices.
    """
    n = weight_values.size
    kernel = [i for i in range(n) if weight_values[i] == 0.0]
    gauge = []
    for a in kernel:
        g = np.zeros((n, n), dtype=complex)
        g[a, a] = 1.0
        g.setflags(write=False)
        gauge.append(g)
    for ai in range(len(kernel)):
        for bi in range(ai + 1, len(kernel)):
            a, b = kernel[ai], kernel[bi]
            g = np.zeros((n, n), dtype=complex)
            g[a, b] = g[b, a] = 1.0 / np.sqrt(2.0)
            g.setflags(write=False)
            gauge.append(g)
            g = np.zeros((n, n), dtype=complex)
            g[a, b] = -1j / np.sqrt(2.0)
            g[b, a] = 1j / np.sqrt(2.0)
            g.setflags(write=False)
            gauge.append(g)
    return tuple(gauge)


def transversal_sld(weight_rates, weights: MixingWeights,
                    basis: GeneratorBasis | None = None) -> SLDSolution:
    """Transversal SLD diag(dk_i / k_i) at a diagonal base point.

    This is the unique diagonal solution of dk_i = k_i L_ii.  Rates must
    vanish wherever the corresponding weight is zero.
    """
    n = weights.dimension
    basis = _resolve_basis(n, basis)
    rates = np.asarray(weight_rates, dtype=float)
    if rates.shape != (n,):
        raise ValueError(f"expected {n} weight rates, got shape {rates.shape}")
    k = weights.values
    entries = np.zeros(n)
    for i in range(n):
        if k[i] > 0.0:
            entries[i] = rates[i] / k[i]
        elif rates[i] != 0.0:
            raise InconsistentSystemError(
                f"transversal rate dk_{i} = {rates[i]!r} at zero weight "
                f"k_{i} = 0 has no SLD")
    L = np.diag(entries).astype(complex)
    coeff_identity, coeffs = expand(L, basis)
    gauge = _kernel_gauge_basis(k)
    state_matrix = np.diag(k).astype(complex)
    form_matrix = np.diag(rates).astype(complex)
    residual = _sld_residual(state_matrix, form_matrix, L)
    L.setflags(write=False)
    coeffs.setflags(write=False)
    return SLDSolution(coeff_identity, coeffs, L, gauge, residual)
