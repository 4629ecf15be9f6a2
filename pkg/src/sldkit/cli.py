"""Command-line front end: bases, SLDs, Fisher information, Fisher tensors.

Commands
--------
basis   Emit a generator basis and its structure constants as JSON.
sld     Solve for the SLD of a one-parameter family at a given theta.
qfi     Tabulate the quantum Fisher information over a theta sweep.
tensor  Six-direction Fisher tensor of a three-level state with closed-form
        comparison.

Families are described by a kind-tagged JSON object:

    {"kind": "exp_generator", "n": 2, "weights": [0.75, 0.25],
     "generator_coeffs": [0.0, 0.5, 0.0]}

for rho(theta) = exp(-i theta K) rho0 exp(i theta K) with K expanded on the
generator basis;

    {"kind": "explicit_matrices", "n": 2, "fd_step": 1e-5,
     "matrices": [[0.0, [[[re, im], ...], ...]], ...]}

for sampled matrices (linearly interpolated, tangents by central
differences); and

    {"kind": "weight_path", "n": 2, "weights": [0.75, 0.25],
     "weight_rates": [1.0, -1.0]}

for transversal weight variation rho(theta) = diag(k + theta dk).

Exit status: 0 success, 1 usage error, 2 numerical error; diagnostics are a
single stderr line prefixed "error:".  SLDKIT_TOL overrides the default
tolerance 1e-10 (an explicit --tol wins over the environment).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import fisher, oracle, sld_solver
from .lie_basis import build_basis, compute_structure_constants, pairs_to_matrix
from .sld_solver import (DEFAULT_TOL, DegenerateWeightsError, NumericalError,
                         SLDSolution)
from .state_space import (DEFAULT_FD_STEP, DensityState, MixingWeights,
                          TangentForm, base_point, numeric_tangent,
                          reconstruct, tangent_from_generator,
                          transversal_tangent)

_FAMILY_KINDS = ("exp_generator", "explicit_matrices", "weight_path")


@dataclass
class FamilySpec:
    """Parsed one-parameter family description."""

    kind: str
    n: int
    weights: MixingWeights | None = None
    generator_coeffs: np.ndarray | None = None
    matrices: list | None = None
    weight_rates: np.ndarray | None = None
    fd_step: float = DEFAULT_FD_STEP


def parse_family(data: dict) -> FamilySpec:
    """Validate a family mapping: exactly the fields of its kind are allowed."""
    if not isinstance(data, dict):
        raise ValueError("family description must be a JSON object")
    kind = data.get("kind")
    if kind not in _FAMILY_KINDS:
        raise ValueError(f"unknown family kind {kind!r}; "
                         f"expected one of {', '.join(_FAMILY_KINDS)}")
    if "n" not in data:
        raise ValueError("family description is missing 'n'")
    n = int(data["n"])
    if n < 2:
        raise ValueError(f"dimension must be at least 2, got {n}")

    required = {"exp_generator": {"weights", "generator_coeffs"},
                "explicit_matrices": {"matrices"},
                "weight_path": {"weights", "weight_rates"}}[kind]
    optional = {"fd_step"} if kind == "explicit_matrices" else set()
    present = set(data) - {"kind", "n"}
    missing = required - present
    if missing:
        raise ValueError(f"family kind {kind!r} is missing fields: "
                         f"{', '.join(sorted(missing))}")
    extra = present - required - optional
    if extra:
        raise ValueError(f"family kind {kind!r} does not accept fields: "
                         f"{', '.join(sorted(extra))}")

    spec = FamilySpec(kind=kind, n=n)
    if "weights" in required:
        spec.weights = MixingWeights(data["weights"], n)
    if kind == "exp_generator":
        coeffs = np.asarray(data["generator_coeffs"], dtype=float)
        if coeffs.shape != (n * n - 1,):
            raise ValueError(
                f"generator_coeffs must have length {n * n - 1}, "
                f"got shape {coeffs.shape}")
        spec.generator_coeffs = coeffs
    elif kind == "explicit_matrices":
        samples = []
        for entry in data["matrices"]:
            if not isinstance(entry, (list, tuple)) or len(entry) != 2:
                raise ValueError("each sample must be a [theta, matrix] pair")
            theta, mat = entry
            matrix = pairs_to_matrix(mat)
            if matrix.shape != (n, n):
                raise ValueError(f"sample matrix has shape {matrix.shape}, "
                                 f"expected ({n}, {n})")
            samples.append((float(theta), matrix))
        if len(samples) < 2:
            raise ValueError("explicit_matrices needs at least two samples")
        samples.sort(key=lambda s: s[0])
        spec.matrices = samples
        spec.fd_step = float(data.get("fd_step", DEFAULT_FD_STEP))
    else:
        rates = np.asarray(data["weight_rates"], dtype=float)
        if rates.shape != (n,):
            raise ValueError(f"weight_rates must have length {n}, "
                             f"got shape {rates.shape}")
        spec.weight_rates = rates
    return spec


def _expm_generator(K: np.ndarray, theta: float) -> np.ndarray:
    """exp(-i theta K) for Hermitian K, by eigendecomposition."""
    w, V = np.linalg.eigh(K)
    return (V * np.exp(-1j * theta * w)) @ V.conj().T


def _interpolator(samples):
    thetas = np.array([s[0] for s in samples])
    mats = np.stack([s[1] for s in samples])

    def family(theta: float) -> np.ndarray:
        if theta < thetas[0] - 1e-12 or theta > thetas[-1] + 1e-12:
            raise ValueError(
                f"theta {theta!r} outside the sampled range "
                f"[{thetas[0]!r}, {thetas[-1]!r}]")
        theta = min(max(theta, thetas[0]), thetas[-1])
        j = int(np.searchsorted(thetas, theta))
        if j == 0:
            return mats[0]
        if thetas[j - 1] == theta:
            return mats[j - 1]
        t0, t1 = thetas[j - 1], thetas[j]
        frac = (theta - t0) / (t1 - t0)
        return (1.0 - frac) * mats[j - 1] + frac * mats[j]

    return family


def family_state_and_tangent(spec: FamilySpec, theta: float, *,
                             fd_step: float | None = None):
    """Evaluate (state, tangent) of a family at theta.

    exp_generator families get the analytic tangent -i[K, rho(theta)];
    explicit_matrices use central differences on the interpolated samples;
    weight_path families get the transversal tangent sum dk_i P_i.
    """
    basis = build_basis(spec.n)
    if spec.kind == "exp_generator":
        rho0 = base_point(spec.weights, basis)
        K = reconstruct(0.0, spec.generator_coeffs, basis)
        U = _expm_generator(K, theta)
        state = DensityState.from_matrix(U @ rho0.matrix @ U.conj().T, basis)
        form = tangent_from_generator(K, state, basis)
        return state, form
    if spec.kind == "explicit_matrices":
        step = spec.fd_step if fd_step is None else fd_step
        family = _interpolator(spec.matrices)
        state = DensityState.from_matrix(family(theta), basis)
        form = numeric_tangent(family, theta, step, basis)
        return state, form
    values = spec.weights.values + theta * spec.weight_rates
    weights = MixingWeights(values)
    state = base_point(weights, basis)
    form = transversal_tangent(spec.weight_rates, state, basis)
    return state, form


def _solve_general(state, form, tol) -> SLDSolution:
    constants = compute_structure_constants(build_basis(state.dimension))
    system = sld_solver.assemble(state, form, constants)
    return sld_solver.solve(system, state, tol)


def _dispatch_closed_u3(weights: MixingWeights, form: TangentForm,
                        tol: float) -> SLDSolution:
    k1, k2, k3 = weights.values
    if k3 == 0.0 and k1 > 0.0 and k2 > 0.0:
        return sld_solver.closed_form_u3_rank2(weights, form, tol)
    if k2 == k3 and k2 > 0.0 and k1 != k2:
        return sld_solver.closed_form_u3_degenerate(weights, form, tol)
    return sld_solver.closed_form_u3(weights, form, tol)


def _solve_family(spec: FamilySpec, theta: float, method: str, tol: float, *,
                  fd_step: float | None = None):
    """Return (state, form, solution) at theta for the selected method."""
    state, form = family_state_and_tangent(spec, theta, fd_step=fd_step)
    if method == "general":
        return state, form, _solve_general(state, form, tol)
    if method == "oracle":
        return state, form, oracle.sld_eigenbasis(state, form, tol)
    if method not in ("closed-u2", "closed-u3"):
        raise ValueError(f"unknown method {method!r}")
    if spec.kind != "exp_generator":
        raise ValueError(
            f"method {method!r} requires an exp_generator family")
    expected_n = 2 if method == "closed-u2" else 3
    if spec.n != expected_n:
        raise ValueError(f"method {method!r} requires n = {expected_n}")
    basis = build_basis(spec.n)
    # Pull the form back to the diagonal base point, solve there, push the
    # solution forward: the defining equation is conjugation equivariant.
    K = reconstruct(0.0, spec.generator_coeffs, basis)
    U = _expm_generator(K, theta)
    form0 = TangentForm.from_matrix(U.conj().T @ form.matrix @ U, basis)
    if method == "closed-u2":
        sol0 = sld_solver.closed_form_u2(spec.weights, form0, tol)
    else:
        sol0 = _dispatch_closed_u3(spec.weights, form0, tol)
    L = U @ sol0.matrix @ U.conj().T
    tf = TangentForm.from_matrix(L, basis)
    gauge = tuple(U @ g @ U.conj().T for g in sol0.gauge_basis)
    residual = float(np.linalg.norm(
        form.matrix - 0.5 * (state.matrix @ L + L @ state.matrix)))
    solution = SLDSolution(tf.coeff_identity, tf.coeffs, tf.matrix, gauge,
                           residual)
    return state, form, solution


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _emit(text: str, output: str | None):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _load_family(path: str) -> FamilySpec:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return parse_family(data)


def _tolerance(args) -> float:
    if args.tol is not None:
        return args.tol
    env = os.environ.get("SLDKIT_TOL")
    if env is not None:
        return float(env)
    return DEFAULT_TOL


def _require_json_format(args):
    if args.format != "json":
        raise ValueError("csv format is only supported by the qfi command")


def cmd_basis(args) -> int:
    _require_json_format(args)
    basis = build_basis(args.n)
    constants = compute_structure_constants(basis)
    payload = basis.to_json_dict()
    payload.update(constants.to_json_dict())
    _emit(_dump_json(payload), args.output)
    return 0


def cmd_sld(args) -> int:
    _require_json_format(args)
    spec = _load_family(args.input)
    tol = _tolerance(args)
    _, _, solution = _solve_family(spec, args.theta, args.method, tol,
                                   fd_step=args.fd_step)
    _emit(_dump_json(solution.to_json_dict()), args.output)
    return 0


def _theta_values(args) -> list:
    values = []
    if args.thetas:
        for tok in args.thetas.split(","):
            tok = tok.strip()
            if tok:
                values.append(float(tok))
    if args.theta_range:
        parts = args.theta_range.split(":")
        if len(parts) != 3:
            raise ValueError("theta range must be START:STOP:COUNT")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError("theta range count must be at least 1")
        values.extend(np.linspace(start, stop, count).tolist())
    if not values:
        raise ValueError("no theta values given; use --thetas or --theta-range")
    return sorted(values)


def cmd_qfi(args) -> int:
    spec = _load_family(args.input)
    tol = _tolerance(args)
    rows = []
    for theta in _theta_values(args):
        state, form, solution = _solve_family(spec, theta, args.method, tol,
                                              fd_step=args.fd_step)
        row = {"theta": float(theta),
               "qfi": fisher.qfi_index(state, solution)}
        if args.check_oracle:
            row["qfi_oracle"] = oracle.qfi_eigenbasis(state, form, tol)
            row["abs_dev"] = abs(row["qfi"] - row["qfi_oracle"])
        rows.append(row)

    if args.format == "csv":
        columns = ["theta", "qfi"]
        if args.check_oracle:
            columns += ["qfi_oracle", "abs_dev"]
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([repr(row[c]) for c in columns])
        _emit(buf.getvalue(), args.output)
    else:
        payload = {"rows": rows}
        if args.check_oracle:
            payload["max_abs_dev"] = max(row["abs_dev"] for row in rows)
        _emit(_dump_json(payload), args.output)
    return 0


def cmd_tensor(args) -> int:
    _require_json_format(args)
    values = [float(tok) for tok in args.weights.split(",") if tok.strip()]
    if len(values) != 3:
        raise ValueError(f"tensor needs exactly 3 weights, got {len(values)}")
    weights = MixingWeights(values)
    tol = _tolerance(args)
    k = weights.values
    gaps = [abs(k[a] - k[b]) for a, b in ((0, 1), (0, 2), (1, 2))]
    degenerate = min(gaps) <= 1e-12
    if degenerate and not args.allow_degenerate:
        raise DegenerateWeightsError(
            "repeated weights collapse the chart; pass --allow-degenerate "
            "for the closed-form coefficients")

    if abs(k[2]) <= 1e-12 and not degenerate:
        closed = fisher.closed_form_fisher_u3_rank2(weights)
    else:
        closed = fisher.closed_form_fisher_u3(weights)
    payload = {
        "weights": [float(v) for v in k],
        "closed_form": {"pairs": [[float(g), float(w)] for g, w in closed]},
        "tensor": None,
        "max_deviation": None,
    }
    if not degenerate:
        basis = build_basis(3)
        state = base_point(weights, basis)
        chart = fisher.FlagChartU3(weights)
        tangents = fisher.chart_tangents_u3(chart, basis)
        slds = [_solve_general(state, form, tol) for form in tangents]
        tensor = fisher.fisher_tensor(state, slds)
        payload["tensor"] = tensor.to_json_dict()
        payload["max_deviation"] = fisher.closed_form_deviation(tensor, closed)
    _emit(_dump_json(payload), args.output)
    return 0


def _add_common_flags(parser):
    parser.add_argument("--output", help="write to this path instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--tol", type=float, default=None,
                        help="numerical tolerance (default 1e-10 or SLDKIT_TOL)")


def _add_family_flags(parser):
    parser.add_argument("--input", required=True,
                        help="path to a family-spec JSON file")
    parser.add_argument("--method", default="general",
                        choices=("general", "closed-u3", "closed-u2", "oracle"))
    parser.add_argument("--fd-step", type=float, default=None,
                        help="finite-difference step for sampled families")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sldkit",
                     description="Symmetric logarithmic derivatives and "
                                 "quantum Fisher information")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", help="emit a generator basis and its "
                                     "structure constants")
    p.add_argument("--n", type=int, required=True)
    _add_common_flags(p)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("sld", help="solve for the SLD of a family at theta")
    _add_family_flags(p)
    p.add_argument("--theta", type=float, default=0.0)
    _add_common_flags(p)
    p.set_defaults(func=cmd_sld)

    p = sub.add_parser("qfi", help="tabulate the Fisher information over theta")
    _add_family_flags(p)
    p.add_argument("--thetas", help="comma-separated theta values")
    p.add_argument("--theta-range", help="START:STOP:COUNT sweep")
    p.add_argument("--check-oracle", action="store_true",
                   help="add a spectral-method column and deviation summary")
    _add_common_flags(p)
    p.set_defaults(func=cmd_qfi)

    p = sub.add_parser("tensor", help="six-direction Fisher tensor of a "
                                      "three-level state")
    p.add_argument("--weights", required=True,
                   help="comma-separated three-level weights")
    p.add_argument("--allow-degenerate", action="store_true",
                   help="emit closed-form coefficients for repeated weights")
    _add_common_flags(p)
    p.set_defaults(func=cmd_tensor)
    return parser


def _fail(message: str, code: int) -> int:
    text = " ".join(str(message).split())
    print(f"error: {text}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        return _fail(str(exc), 1)
    except SystemExit as exc:  # --help
        code = exc.code
        return 0 if code in (None, 0) else int(code)
    try:
        return int(args.func(args))
    except NumericalError as exc:
        return _fail(str(exc), 2)
    except (ValueError, OSError) as exc:
        return _fail(str(exc), 1)


if __name__ == "__main__":
    raise SystemExit(main())
