"""JSON documents: integrand specs, SDE specs, certificates and experiment reports.

Every document written here carries ``"schema": "pathwise-calc/1"``.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from pathcalc.core.common.exceptions import ConfigError
from pathcalc.core.common.logging import StructuredLogger
from pathcalc.core.hedging import (
    BdgStrategyRule,
    FixedStrategy,
    ScaledStrategy,
    Strategy,
    SumStrategy,
    ZeroStrategy,
)
from pathcalc.core.integration import (
    CrossingTimesRule,
    DeterministicTimesRule,
    IntegrandSource,
    OperatorPathFunctional,
    RuleIntegrand,
    SimpleIntegrand,
    as_matrix,
)
from pathcalc.core.outer import HedgingCertificate
from pathcalc.core.sde import (
    SdeSpec,
    affine_drift,
    constant_diffusion,
    constant_drift,
    linear_diffusion,
    time_driver,
)
from pathcalc.core.sde.spec import DiffusionFn, DriftFn

logger = StructuredLogger(__name__)

SCHEMA = "pathwise-calc/1"


class PathcalcJSONEncoder(json.JSONEncoder):
    """JSON encoder for numpy values and pathcalc records."""

    def default(self, o: Any) -> Any:
        """Encode custom types."""
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.generic):
            return o.item()
        if hasattr(o, "to_dict"):
            return o.to_dict()
        if is_dataclass(o) and not isinstance(o, type):
            return asdict(o)
        if isinstance(o, Path):
            return str(o)
        return super().default(o)


def dumps(document: Mapping[str, Any]) -> str:
    """Canonical text of a document: sorted keys, two-space indent."""
    return json.dumps(document, cls=PathcalcJSONEncoder, sort_keys=True, indent=2) + "\n"


def write_document(target: str | Path, document: Mapping[str, Any]) -> Path:
    """Write ``document`` with the schema field added."""
    location = Path(target)
    location.parent.mkdir(parents=True, exist_ok=True)
    location.write_text(dumps({"schema": SCHEMA, **document}), encoding="utf-8")
    logger.debug("Document written", path=str(location))
    return location


def read_document(source: str | Path, key: str = "spec") -> dict[str, Any]:
    """Read a JSON object from ``source``.

    Raises:
        ConfigError: If the file is missing, not JSON, not an object or of another schema.
    """
    location = Path(source)
    try:
        document = json.loads(location.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(key, f"no such file: {location}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(key, f"{location} is not valid JSON: {e.msg}") from e
    if not isinstance(document, dict):
        raise ConfigError(key, f"{location} must hold a JSON object")
    schema = document.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ConfigError(key, f"unsupported schema {schema!r}")
    return document


# === Integrands ===


def _step_functional(stop_times: ArrayLike, coeffs: ArrayLike) -> OperatorPathFunctional:
    starts = np.asarray(stop_times, dtype=np.float64).ravel()
    values = np.stack([as_matrix(c) for c in np.asarray(coeffs, dtype=np.float64)])
    if starts.size != values.shape[0]:
        raise ConfigError("integrand", "one coefficient per stop time is required")

    def at(t: float) -> np.ndarray:
        return values[max(int(np.searchsorted(starts, t, side="right")) - 1, 0)]

    return OperatorPathFunctional.deterministic(at, values.shape[1:], name="step")


def decode_functional(spec: Mapping[str, Any]) -> OperatorPathFunctional:
    """Build an operator-valued path functional.

    Accepted forms: ``{"functional": "constant", "value": M}``, ``{"functional": "time"}``
    (F_t = scale t), ``{"functional": "path"}`` (F_t = scale w(t), scalar paths) and the
    step form ``{"stop_times": [...], "coeffs": [...]}`` read right-continuously.
    """
    if "stop_times" in spec:
        return _step_functional(spec["stop_times"], spec["coeffs"])
    kind = spec.get("functional")
    scale = float(spec.get("scale", 1.0))
    if kind == "constant":
        return OperatorPathFunctional.constant(spec.get("value", [[1.0]]))
    if kind == "time":
        return OperatorPathFunctional.deterministic(
            lambda t: np.array([[scale * t]]), lipschitz_in_time=abs(scale), name="time"
        )
    if kind == "path":
        return OperatorPathFunctional.markov(
            lambda times, states: scale * np.asarray(states).reshape(-1, 1, 1), name="path"
        )
    raise ConfigError("integrand", f"unknown functional {kind!r}")


def _coefficient(spec: Any) -> OperatorPathFunctional:
    if isinstance(spec, Mapping):
        return decode_functional(spec)
    return OperatorPathFunctional.constant(spec if spec is not None else [[1.0]])


def decode_integrand(spec: Mapping[str, Any], times: ArrayLike | None = None) -> IntegrandSource:
    """Build an integrand source from its JSON spec.

    ``{"stop_times": [...], "coeffs": [...]}`` resolves on ``times``; ``{"rule": "crossing",
    "epsilon": e}`` and ``{"rule": "deterministic", "stop_times": [...]}`` resolve per path,
    with an optional ``coefficient`` (matrix or functional spec, default 1).
    """
    if "stop_times" in spec and "rule" not in spec:
        if times is None:
            raise ConfigError("integrand", "stop-time integrands need a grid")
        return SimpleIntegrand.from_stop_times(times, spec["stop_times"], spec["coeffs"])
    rule = spec.get("rule")
    coefficient = _coefficient(spec.get("coefficient"))
    if rule == "crossing":
        epsilon = float(spec.get("epsilon", 0.0))
        if epsilon <= 0:
            raise ConfigError("integrand", "crossing rule needs a positive epsilon")
        return RuleIntegrand(
            CrossingTimesRule(epsilon), coefficient, name=f"crossing({epsilon:g})"
        )
    if rule == "deterministic":
        stops = tuple(float(t) for t in spec.get("stop_times", ()))
        return RuleIntegrand(DeterministicTimesRule(stops), coefficient, name="deterministic")
    raise ConfigError("integrand", f"unknown integrand spec {dict(spec)!r}")


def read_integrand(source: str | Path, times: ArrayLike | None = None) -> IntegrandSource:
    return decode_integrand(read_document(source, "integrand"), times)


# === Certificates ===


def decode_strategy(spec: Mapping[str, Any], times: ArrayLike) -> Strategy:
    """Rebuild a strategy from ``Strategy.to_spec`` output on the grid ``times``."""
    kind = spec.get("kind")
    if kind == "zero":
        return ZeroStrategy()
    if kind == "fixed":
        return FixedStrategy(
            decode_integrand(spec["H"], times), decode_integrand(spec["G"], times)
        )
    if kind == "bdg":
        level = spec.get("level", "grid")
        integrand = spec["integrand"]
        if "stop_times" not in integrand:
            raise ConfigError("certificate", f"rule {integrand.get('rule')!r} is not rebuildable")
        return BdgStrategyRule(
            decode_integrand(integrand, times),
            None if level == "grid" else int(level),
            spec.get("mode", "direction"),
        )
    if kind == "sum":
        return SumStrategy(tuple(decode_strategy(part, times) for part in spec["parts"]))
    if kind == "scaled":
        return ScaledStrategy(decode_strategy(spec["inner"], times), float(spec["factor"]))
    raise ConfigError("certificate", f"unknown strategy kind {kind!r}")


def write_certificate(target: str | Path, cert: HedgingCertificate) -> Path:
    return write_document(target, {"certificate": cert.to_dict()})


def read_certificate(source: str | Path, times: ArrayLike) -> HedgingCertificate:
    """Read a certificate; its verification record is not carried over."""
    body = read_document(source, "certificate").get("certificate")
    if not isinstance(body, dict):
        raise ConfigError("certificate", "document holds no certificate")
    strategies = tuple(decode_strategy(spec, times) for spec in body.get("strategies", ()))
    return HedgingCertificate(float(body["lambda"]), strategies, str(body.get("target", "")))


# === SDE specs ===


def decode_sde_spec(spec: Mapping[str, Any], times: ArrayLike) -> SdeSpec:
    """Build an SdeSpec driven by ``A_t = t`` on ``times``.

    ``drift``: ``{"kind": "zero"}``, ``{"kind": "constant", "value": v}`` or
    ``{"kind": "affine", "a": a}`` (mu = a - x). ``diffusion``: ``{"kind": "linear",
    "sigma0": s}`` or ``{"kind": "constant", "matrix": M}``.
    """
    try:
        x0 = np.atleast_1d(np.asarray(spec["x0"], dtype=np.float64))
        mu = _decode_drift(spec.get("drift", {"kind": "zero"}), x0.size)
        sigma, d_H = _decode_diffusion(spec["diffusion"])  # noqa: N806
        L = float(spec["L"])  # noqa: N806
        c = float(spec.get("c", 1.0))
    except KeyError as e:
        raise ConfigError("spec", f"missing field {e.args[0]!r}") from e
    except (TypeError, ValueError, AttributeError) as e:
        raise ConfigError("spec", f"malformed field: {e}") from e
    return SdeSpec(
        x0=x0,
        mu=mu,
        sigma=sigma,
        L=L,
        A=time_driver(times),
        c=c,
        d_H=d_H,
        name=str(spec.get("name", "sde")),
    )


def _decode_drift(drift_spec: Mapping[str, Any], dim: int) -> DriftFn:
    kind = drift_spec.get("kind")
    if kind == "zero":
        return constant_drift(np.zeros(dim))
    if kind == "constant":
        return constant_drift(np.asarray(drift_spec["value"], dtype=np.float64))
    if kind == "affine":
        return affine_drift(float(drift_spec["a"]))
    raise ConfigError("spec", f"unknown drift kind {kind!r}")


def _decode_diffusion(diffusion_spec: Mapping[str, Any]) -> tuple[DiffusionFn, int]:
    kind = diffusion_spec.get("kind")
    if kind == "linear":
        return linear_diffusion(float(diffusion_spec["sigma0"])), 1
    if kind == "constant":
        matrix = as_matrix(np.asarray(diffusion_spec["matrix"], dtype=np.float64))
        return constant_diffusion(matrix), matrix.shape[1]
    raise ConfigError("spec", f"unknown diffusion kind {kind!r}")


def read_sde_spec(source: str | Path, times: ArrayLike) -> SdeSpec:
    return decode_sde_spec(read_document(source, "spec"), times)
