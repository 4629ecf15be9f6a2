"""Generalized Gell-Mann bases for su(n) and their structure constants.

The basis for dimension ``n`` consists of the ``n**2 - 1`` traceless Hermitian
generators ``t_i`` normalized so that ``Tr(t_i t_j) = 2 delta_ij``.  For
``n = 2`` the ordering is the Pauli triple (sigma_1, sigma_2, sigma_3) and for
``n = 3`` the standard Gell-Mann numbering lambda_1..lambda_8.  For ``n > 3``
the off-diagonal symmetric/antisymmetric pairs come first, ordered
lexicographically by ``(j, k)``, with the ``n - 1`` diagonal generators
appended; the ``labels`` field records the slot assignment.

Structure constants are computed from traces of (anti)commutators,

    c_ijk = Tr([t_i, t_j] t_k) / (4i)      (totally antisymmetric)
    f_ijk = Tr({t_i, t_j} t_k) / 4         (totally symmetric)

so that ``[t_i, t_j] = 2i sum_k c_ijk t_k`` and
``{t_i, t_j} = (4/n) delta_ij 1 + 2 sum_k f_ijk t_k``.  They are stored
sparsely by canonical (sorted) index triple.  All indices are 0-based.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

#: entries below this magnitude are treated as exact zeros of the trace algebra
DROP_TOL = 1e-12


def matrix_to_pairs(matrix) -> list:
    """Encode a complex matrix as nested lists of [re, im] pairs."""
    m = np.asarray(matrix, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def pairs_to_matrix(data) -> np.ndarray:
    """Decode the nested [re, im] pair representation back into an array."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("expected a nested list of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _sort3(i: int, j: int, k: int):
    """Sort an index triple, returning the canonical key and the swap parity."""
    sign = 1
    if i > j:
        i, j, sign = j, i, -sign
    if j > k:
        j, k, sign = k, j, -sign
    if i > j:
        i, j, sign = j, i, -sign
    return (i, j, k), sign


class StructureTensor:
    """Sparse rank-3 tensor that is totally symmetric or totally antisymmetric.

    Only the canonical (sorted) index triple of each orbit is stored; lookups
    apply the permutation rule of the declared symmetry class.
    """

    def __init__(self, size: int, entries: dict, symmetric: bool,
                 _dense: np.ndarray | None = None):
        self.size = int(size)
        self.symmetric = bool(symmetric)
        self._entries = {tuple(k): float(v) for k, v in entries.items()}
        self._dense = _dense

    def __len__(self) -> int:
        return len(self._entries)

    def items(self):
        """Iterate over (canonical triple, value) pairs."""
        return self._entries.items()

    def get(self, i: int, j: int, k: int) -> float:
        key, sign = _sort3(i, j, k)
        value = self._entries.get(key, 0.0)
        if self.symmetric:
            return value
        if key[0] == key[1] or key[1] == key[2]:
            return 0.0
        return sign * value

    def to_dense(self) -> np.ndarray:
        """Expand to a dense (size, size, size) array.  Cached."""
        if self._dense is None:
            dense = np.zeros((self.size,) * 3)
            for key, value in self._entries.items():
                for perm in set(itertools.permutations(key)):
                    if self.symmetric:
                        dense[perm] = value
                    else:
                        _, sign = _sort3(*perm)
                        dense[perm] = sign * value
            dense.setflags(write=False)
            self._dense = dense
        return self._dense

    def to_json_list(self) -> list:
        """Canonical entries as [i, j, k, value] rows, sorted by triple."""
        return [[int(i), int(j), int(k), float(v)]
                for (i, j, k), v in sorted(self._entries.items())]


@dataclass(frozen=True, eq=False)
class GeneratorBasis:
    """Ordered traceless Hermitian generators of su(n).

    Attributes
    ----------
    dimension : int
        Matrix dimension n.
    generators : numpy.ndarray
        Read-only array of shape (n**2 - 1, n, n).
    diagonal_indices : tuple of int
        Slots holding diagonal generators (n - 1 of them).
    offdiagonal_indices : tuple of int
        The complementary slots.
    labels : tuple
        One entry per slot: ("sym", j, k), ("antisym", j, k) for the pair
        generators acting on rows/columns j < k, or ("diag", l) for the
        diagonal generator sqrt(2/(l(l+1))) * diag(1,...,1,-l,0,...,0).
    """

    dimension: int
    generators: np.ndarray
    diagonal_indices: tuple
    offdiagonal_indices: tuple
    labels: tuple

    def generator(self, i: int) -> np.ndarray:
        return self.generators[i]

    def to_json_dict(self) -> dict:
        return {
            "n": int(self.dimension),
            "generators": [matrix_to_pairs(g) for g in self.generators],
        }


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """Antisymmetric (c) and symmetric (f) structure constants of a basis."""

    dimension: int
    c: StructureTensor
    f: StructureTensor
    diagonal_indices: tuple = ()

    def to_json_dict(self) -> dict:
        return {
            "n": int(self.dimension),
            "c": self.c.to_json_list(),
            "f": self.f.to_json_list(),
        }


def _ordered_labels(n: int) -> tuple:
    if n <= 3:
        # Diagonal generator l follows the pairs confined to the first l+1
        # basis vectors; this reproduces the Pauli / Gell-Mann numbering.
        labels = []
        for d in range(1, n):
            for j in range(d):
                labels.append(("sym", j, d))
                labels.append(("antisym", j, d))
            labels.append(("diag", d))
        return tuple(labels)
    labels = []
    for j in range(n):
        for k in range(j + 1, n):
            labels.append(("sym", j, k))
            labels.append(("antisym", j, k))
    labels.extend(("diag", l) for l in range(1, n))
    return tuple(labels)


def _generator_from_label(n: int, label) -> np.ndarray:
    kind = label[0]
    mat = np.zeros((n, n), dtype=complex)
    if kind == "sym":
        _, j, k = label
        mat[j, k] = mat[k, j] = 1.0
    elif kind == "antisym":
        _, j, k = label
        mat[j, k] = -1j
        mat[k, j] = 1j
    elif kind == "diag":
        _, l = label
        scale = np.sqrt(2.0 / (l * (l + 1)))
        for i in range(l):
            mat[i, i] = scale
        mat[l, l] = -l * scale
    else:  # pragma: no cover - labels are produced internally
        raise ValueError(f"unknown generator label {label!r}")
    return mat


@lru_cache(maxsize=None)
def build_basis(n: int) -> GeneratorBasis:
    """Construct the generator basis for dimension ``n``.

    Parameters
    ----------
    n : int
        Matrix dimension, at least 2.

    Returns
    -------
    GeneratorBasis
        Immutable basis satisfying Tr(t_i t_j) = 2 delta_ij; instances are
        cached per dimension and safe to share.
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"dimension must be at least 2, got {n}")
    labels = _ordered_labels(n)
    generators = np.stack([_generator_from_label(n, lab) for lab in labels])
    generators.setflags(write=False)
    diag = tuple(i for i, lab in enumerate(labels) if lab[0] == "diag")
    offdiag = tuple(i for i, lab in enumerate(labels) if lab[0] != "diag")
    return GeneratorBasis(n, generators, diag, offdiag, labels)


@lru_cache(maxsize=32)
def compute_structure_constants(basis: GeneratorBasis,
                                drop_tol: float = DROP_TOL) -> StructureConstants:
    """Compute c and f tensors of a basis from (anti)commutator traces.

    Entries with magnitude below ``drop_tol`` are dropped from the sparse
    storage; they arise only from rounding in the trace arithmetic.
    """
    t = basis.generators
    size = t.shape[0]
    tr_abc = np.einsum("aij,bjk,cki->abc", t, t, t, optimize=True)
    tr_bac = tr_abc.transpose(1, 0, 2)
    c_dense = ((tr_abc - tr_bac) / 4j).real.copy()
    f_dense = ((tr_abc + tr_bac) / 4.0).real.copy()
    c_dense[np.abs(c_dense) < drop_tol] = 0.0
    f_dense[np.abs(f_dense) < drop_tol] = 0.0
    c_dense.setflags(write=False)
    f_dense.setflags(write=False)

    c_entries, f_entries = {}, {}
    for i in range(size):
        for j in range(i, size):
            for k in range(j, size):
                if i < j < k and c_dense[i, j, k] != 0.0:
                    c_entries[(i, j, k)] = float(c_dense[i, j, k])
                if f_dense[i, j, k] != 0.0:
                    f_entries[(i, j, k)] = float(f_dense[i, j, k])

    return StructureConstants(
        dimension=basis.dimension,
        c=StructureTensor(size, c_entries, symmetric=False, _dense=c_dense),
        f=StructureTensor(size, f_entries, symmetric=True, _dense=f_dense),
        diagonal_indices=basis.diagonal_indices,
    )


def _argmax_index(arr: np.ndarray) -> tuple:
    return tuple(int(v) for v in np.unravel_index(np.argmax(np.abs(arr)), arr.shape))


def verify_basis(basis: GeneratorBasis, constants: StructureConstants,
                 tol: float = 1e-10) -> list:
    """Check every basis/constants invariant, returning violation messages.

    An empty list means all identities hold within ``tol``.  Each entry names
    the violated identity and the offending (0-based) indices; aggregate
    identities (symmetry, Jacobi, product reconstruction) report only the
    worst offender.
    """
    if constants.dimension != basis.dimension:
        raise ValueError("basis and constants dimensions do not match")
    report = []
    t = basis.generators
    n = basis.dimension
    size = t.shape[0]

    for i in range(size):
        herm = np.abs(t[i] - t[i].conj().T).max()
        if herm > tol:
            report.append(f"generator {i} not Hermitian (max deviation {herm:.3e})")
        trace = abs(np.trace(t[i]))
        if trace > tol:
            report.append(f"generator {i} not traceless (|trace| {trace:.3e})")

    gram = np.einsum("aij,bji->ab", t, t).real
    gram_dev = gram - 2.0 * np.eye(size)
    for i, j in zip(*np.nonzero(np.abs(gram_dev) > tol)):
        report.append(
            f"trace orthonormality violated at ({i}, {j}): Tr = {gram[i, j]:.12g}")

    for i in basis.diagonal_indices:
        offdiag = np.abs(t[i] - np.diag(np.diag(t[i]))).max()
        if offdiag > tol:
            report.append(f"diagonal generator {i} has off-diagonal entries")
    for i in basis.offdiagonal_indices:
        diag = np.abs(np.diag(t[i])).max()
        if diag > tol:
            report.append(f"off-diagonal generator {i} has nonzero diagonal")

    c_dense = constants.c.to_dense()
    f_dense = constants.f.to_dense()
    for axes in ((1, 0, 2), (0, 2, 1)):
        c_dev = np.abs(c_dense + c_dense.transpose(axes)).max()
        if c_dev > tol:
            report.append(
                f"antisymmetry of c violated under axes {axes} "
                f"(max deviation {c_dev:.3e})")
        f_dev = np.abs(f_dense - f_dense.transpose(axes)).max()
        if f_dev > tol:
            report.append(
                f"symmetry of f violated under axes {axes} "
                f"(max deviation {f_dev:.3e})")

    cc = np.einsum("ijm,mkl->ijkl", c_dense, c_dense, optimize=True)
    jacobi = cc + cc.transpose(1, 2, 0, 3) + cc.transpose(2, 0, 1, 3)
    if np.abs(jacobi).max() > tol:
        idx = _argmax_index(jacobi)
        report.append(
            f"Jacobi identity violated at {idx}: {jacobi[idx]:.3e}")

    for i, j, k in itertools.combinations_with_replacement(basis.diagonal_indices, 3):
        if abs(constants.c.get(i, j, k)) > tol:
            report.append(f"c nonzero on diagonal triple ({i}, {j}, {k})")
    for i in basis.diagonal_indices:
        for k in basis.diagonal_indices:
            for j in basis.offdiagonal_indices:
                if abs(constants.f.get(i, j, k)) > tol:
                    report.append(
                        f"f nonzero on mixed diagonal triple ({i}, {j}, {k})")

    products = np.einsum("iab,jbc->ijac", t, t, optimize=True)
    expected = np.einsum("ijl,lac->ijac", f_dense + 1j * c_dense, t, optimize=True)
    eye_term = (2.0 / n) * np.eye(n)
    for i in range(size):
        expected[i, i] += eye_term
    recon_dev = np.abs(products - expected)
    if recon_dev.max() > tol:
        worst = np.unravel_index(np.argmax(recon_dev), recon_dev.shape)
        report.append(
            f"product reconstruction violated at ({worst[0]}, {worst[1]}): "
            f"max deviation {recon_dev.max():.3e}")

    return report
