"""Hedging certificates: capital plus explicit strategies bounding the outer measure."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, replace
from functools import partial
from typing import Any

from pathcalc.core.common.exceptions import CertificateError
from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.common.validation import validate_non_negative
from pathcalc.core.execution import PoolSettings, map_paths
from pathcalc.core.hedging import (
    BdgStrategyRule,
    Payoff,
    ScaledStrategy,
    Strategy,
    SumStrategy,
    SupIntegralSquaredPayoff,
    SuperhedgeReport,
    SuperhedgeSettings,
    ZeroStrategy,
    capital_core,
    verify_superhedge,
)
from pathcalc.core.hedging.bdg import CertifyMode
from pathcalc.core.integration import IntegrandSource, resolve_integrand
from pathcalc.core.paths import PathSet, QvSource, qv_of

logger = StructuredLogger(__name__)


@dataclass(frozen=True)
class VerificationRecord:
    """Where and how well a certificate was verified."""

    ensemble: str
    seed: int | None
    n_paths: int
    n_points: int
    T: float
    worst_admissibility: float
    worst_terminal: float
    tol: float
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "ensemble": self.ensemble,
            "seed": self.seed,
            "n_paths": self.n_paths,
            "n_points": self.n_points,
            "T": self.T,
            "worst_admissibility": self.worst_admissibility,
            "worst_terminal": self.worst_terminal,
            "tol": self.tol,
            "passed": self.passed,
        }


@dataclass(frozen=True, eq=False)
class HedgingCertificate:
    """Capital ``lam`` and strategies whose wealth superhedges ``target``.

    The last strategy is the terminal tail used for domination.
    """

    lam: float
    strategies: tuple[Strategy, ...]
    target: str
    verified_on: VerificationRecord | None = None

    def __post_init__(self) -> None:
        validate_non_negative(self.lam, "lam")
        record = self.verified_on
        if record is not None and record.passed and record.worst_admissibility < -record.tol:
            raise CertificateError("verified certificate has a negative admissibility margin")

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": self.lam,
            "target": self.target,
            "strategies": [strategy.to_spec() for strategy in self.strategies],
            "verified_on": None if self.verified_on is None else self.verified_on.to_dict(),
        }


def _describe_paths(paths: PathSet) -> tuple[str, int | None]:
    tag = getattr(paths, "measure_tag", "paths")
    seed = getattr(paths, "seed", None)
    return tag, seed


def verify_certificate(
    cert: HedgingCertificate,
    paths: PathSet,
    payoff: Payoff,
    qvs: QvSource = None,
    *,
    settings: SuperhedgeSettings | None = None,
    pool: PoolSettings | None = None,
) -> tuple[HedgingCertificate, SuperhedgeReport]:
    """Verify ``cert`` on ``paths`` and return it with its verification record attached."""
    report = verify_superhedge(
        cert.lam, cert.strategies, paths, payoff, qvs, settings=settings, pool=pool
    )
    tag, seed = _describe_paths(paths)
    first = paths[0]
    record = VerificationRecord(
        ensemble=tag,
        seed=seed,
        n_paths=len(paths),
        n_points=len(first),
        T=first.T,
        worst_admissibility=report.worst_admissibility,
        worst_terminal=report.worst_terminal,
        tol=report.tol,
        passed=report.passed,
    )
    return replace(cert, verified_on=record), report


def strategy_free_certificate(lam: float, target: str) -> HedgingCertificate:
    """Certificate holding capital only, e.g. ``c T`` for the terminal QV on its prediction set."""
    return HedgingCertificate(lam, (), target)


def _path_capital(
    index: int,
    *,
    F: IntegrandSource,  # noqa: N803
    paths: PathSet,
    qvs: QvSource,
    mode: CertifyMode,
) -> float:
    path = paths[index]
    qv = qv_of(path, qvs, index)
    resolved = resolve_integrand(F, path)
    if mode == "coordinatewise" and resolved.d_K > 1:
        return sum(
            capital_core(replace(resolved, coeffs=resolved.coeffs[:, k : k + 1, :]), qv)
            for k in range(resolved.d_K)
        )
    return capital_core(resolved, qv)


def certify_sup_integral_sq(
    F: IntegrandSource,  # noqa: N803
    paths: PathSet,
    qvs: QvSource = None,
    m: int = 4,
    *,
    mode: CertifyMode = "direction",
    verify: bool = True,
    settings: SuperhedgeSettings | None = None,
    pool: PoolSettings | None = None,
) -> HedgingCertificate:
    """Certified upper bound for ``sup_t ||(F . S)_t||^2`` on ``paths``.

    ``lam = 4 max_paths (||F||^2 . <S>)_T``; the strategies are the BDG strategies over
    refinement levels 0..m followed by the full-grid refinement, which is the terminal
    tail. With ``verify`` the certificate is checked on ``paths`` and carries the record.

    Raises:
        CertificateError: If verification fails.
    """
    validate_non_negative(m, "m")
    capitals = map_paths(
        partial(_path_capital, F=F, paths=paths, qvs=qvs, mode=mode), range(len(paths)), pool
    )
    lam = max(capitals)
    strategies: tuple[Strategy, ...] = tuple(
        BdgStrategyRule(F, level, mode) for level in [*range(m + 1), None]
    )
    cert = HedgingCertificate(lam, strategies, "sup_integral_sq")
    logger.info("BDG certificate built", lam=lam, levels=m + 1, paths=len(paths))
    if not verify:
        return cert
    cert, report = verify_certificate(
        cert, paths, SupIntegralSquaredPayoff(F), qvs, settings=settings, pool=pool
    )
    if not report.passed:
        raise CertificateError(f"BDG certificate failed on paths {report.failures[:10]}")
    return cert


def combine_certificates(certs: Sequence[HedgingCertificate]) -> HedgingCertificate:
    """Certificate for the sum of the targets.

    Capital adds up. The k-th combined strategy trades the sum of the first k + 1
    certificates' strategies at index k, each list padded with its last strategy; the
    combined list is long enough for its last entry to include every certificate's tail.

    Raises:
        CertificateError: If the list is empty or the certificates were verified on
            different grids.
    """
    if not certs:
        raise CertificateError("nothing to combine")
    grids = {
        (c.verified_on.n_points, c.verified_on.T) for c in certs if c.verified_on is not None
    }
    if len(grids) > 1:
        raise CertificateError(f"certificates verified on different grids: {sorted(grids)}")
    length = max(len(certs), *(len(c.strategies) for c in certs))
    combined: list[Strategy] = []
    for k in range(length):
        parts = tuple(
            c.strategies[min(k, len(c.strategies) - 1)] if c.strategies else ZeroStrategy()
            for c in certs[: k + 1]
        )
        combined.append(parts[0] if len(parts) == 1 else SumStrategy(parts))
    return HedgingCertificate(
        lam=sum(c.lam for c in certs),
        strategies=tuple(combined),
        target=" + ".join(c.target for c in certs),
    )


def scale_certificate(cert: HedgingCertificate, factor: float) -> HedgingCertificate:
    """Certificate for ``factor * target``."""
    validate_non_negative(factor, "factor")
    return HedgingCertificate(
        lam=factor * cert.lam,
        strategies=tuple(ScaledStrategy(s, factor) for s in cert.strategies),
        target=f"{factor:g}*{cert.target}",
    )
