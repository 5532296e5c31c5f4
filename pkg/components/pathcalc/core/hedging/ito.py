"""The weak Ito isometry for simple integrands and the pathwise Doob inequality."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
from numpy.typing import ArrayLike

from pathcalc.core.common.validation import ValidationError, validate_finite
from pathcalc.core.integration import SimpleIntegrand, integrate_simple, operator_norms
from pathcalc.core.paths import QvPath, SamplePath, require_same_grid, ss_process


def tilde_integrand(F: SimpleIntegrand, path: SamplePath) -> SimpleIntegrand:  # noqa: N803
    """State-space integrand ``F~`` of the Ito decomposition of ``||(F . S)||^2``.

    On (tau_n, tau_{n+1}] the row coefficient is ``2 (f_n^T (F . S)_{tau_n} -
    ||f_n||^2 S_{tau_n})``, which only uses data up to tau_n.
    """
    integral = integrate_simple(F, path).values
    left = F.stops[:-1]
    accumulated = integral[left]
    states = path.values[left]
    norms = operator_norms(F.coeffs)
    rows = np.einsum("nkh,nk->nh", F.coeffs, accumulated) - (norms * norms)[:, None] * states
    return replace(F, coeffs=(2.0 * rows)[:, None, :], provenance="resolved")


def ito_decomposition_residual(
    F: SimpleIntegrand, path: SamplePath, qv: QvPath  # noqa: N803
) -> SamplePath:
    """``(F~ . S) + (||F||^2 . SS) + (||F||^2 . <S>) - ||(F . S)||^2`` at every grid time.

    Nonnegative for every path; identically zero when both spaces are one-dimensional.
    """
    require_same_grid(path.times, qv.times, "path", "qv")
    weights = F.norms_squared()
    lhs = np.sum(integrate_simple(F, path).values ** 2, axis=1)
    rhs = (
        integrate_simple(tilde_integrand(F, path), path).scalar
        + integrate_simple(weights, ss_process(path, qv)).scalar
        + integrate_simple(weights, SamplePath(path.times, qv.qv)).scalar
    )
    return SamplePath(path.times, rhs - lhs)


def pathwise_bdg_check(x: ArrayLike, *, signed: bool = False) -> tuple[float, float]:
    """Both sides of the pathwise Doob inequality for a finite real sequence.

    Returns ``(max_n x_n^2, 4 x_N^2 - 4 sum_n M_n u_n (x_{n+1} - x_n))`` with
    ``M_n = max_{i<=n} |x_i|`` and ``u_n = sgn(x_n)``, which holds for every real sequence.
    ``signed=True`` evaluates the form with ``M_n = max_{i<=n} x_i`` and ``u_n = 1``;
    that form is only valid for nonnegative sequences.
    """
    values = np.asarray(x, dtype=np.float64).ravel()
    if values.size == 0:
        raise ValidationError("sequence must be nonempty", "x")
    validate_finite(values, "x")
    lhs = float(np.max(values * values))
    if signed:
        weights = np.maximum.accumulate(values)[:-1]
    else:
        weights = np.maximum.accumulate(np.abs(values))[:-1] * np.sign(values[:-1])
    rhs = 4.0 * values[-1] ** 2 - 4.0 * float(np.sum(weights * np.diff(values)))
    return lhs, rhs
