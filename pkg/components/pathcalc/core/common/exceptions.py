"""Exception types for pathcalc."""


class PathcalcError(Exception):
    """Base exception for all pathcalc errors."""


class GridMismatchError(PathcalcError):
    """Raised when two objects that must share a time grid do not."""

    def __init__(self, left: str, right: str, detail: str = ""):
        """Initialize grid mismatch error.

        Args:
            left: Description of the first object
            right: Description of the second object
            detail: Optional extra information (lengths, endpoints)
        """
        self.left = left
        self.right = right
        self.detail = detail
        suffix = f": {detail}" if detail else ""
        super().__init__(f"Grid of '{left}' does not match grid of '{right}'{suffix}")


class DimensionMismatchError(PathcalcError):
    """Raised when array or operator dimensions are incompatible."""

    def __init__(self, what: str, expected: object, actual: object):
        """Initialize dimension mismatch error.

        Args:
            what: The quantity whose dimension is wrong
            expected: The expected dimension or shape
            actual: The dimension or shape that was supplied
        """
        self.what = what
        self.expected = expected
        self.actual = actual
        super().__init__(f"Dimension mismatch for {what}: expected {expected}, got {actual}")


class SlopeBoundError(PathcalcError):
    """Raised when a finite-variation driver moves faster than its declared slope bound."""

    def __init__(self, bound: float, observed: float):
        """Initialize slope bound error.

        Args:
            bound: The admissible slope c·(1 + slack)
            observed: The largest observed difference quotient
        """
        self.bound = bound
        self.observed = observed
        super().__init__(f"Driver slope {observed:.6g} exceeds admissible bound {bound:.6g}")


class LipschitzViolationError(PathcalcError):
    """Raised when a probe pair contradicts a declared Lipschitz constant."""

    def __init__(self, declared: float, observed: float, probe: str = ""):
        """Initialize Lipschitz violation error.

        Args:
            declared: The declared Lipschitz constant
            observed: The ratio observed on the offending probe pair
            probe: Human readable description of the probe pair
        """
        self.declared = declared
        self.observed = observed
        self.probe = probe
        where = f" at {probe}" if probe else ""
        super().__init__(
            f"Declared Lipschitz constant {declared:.6g} violated{where}: "
            f"observed ratio {observed:.6g}"
        )


class NotCauchyError(PathcalcError):
    """Raised when a sequence admits no subsequence with geometrically small gaps."""

    def __init__(self, bounds: list[float]):
        """Initialize not-Cauchy error.

        Args:
            bounds: The declared consecutive bounds
        """
        self.bounds = bounds
        super().__init__(f"Sequence is not Cauchy under the declared bounds {bounds}")


class ResolutionError(PathcalcError):
    """Raised when a requested refinement exceeds the grid resolution."""

    def __init__(self, requested: int, available: int):
        """Initialize resolution error.

        Args:
            requested: Requested number of pieces
            available: Number of grid steps available
        """
        self.requested = requested
        self.available = available
        super().__init__(
            f"Requested {requested} pieces but the grid only has {available} steps"
        )


class MeasureTagError(PathcalcError):
    """Raised when a sampler law is unknown or not supported on the prediction set."""

    def __init__(self, tag: str, reason: str):
        """Initialize measure tag error.

        Args:
            tag: The offending measure tag
            reason: Why it was rejected
        """
        self.tag = tag
        self.reason = reason
        super().__init__(f"Measure '{tag}' rejected: {reason}")


class CertificateError(PathcalcError):
    """Raised when certificates cannot be built or combined."""


class ConfigError(PathcalcError):
    """Raised for malformed or incomplete experiment configuration."""

    def __init__(self, key: str, reason: str):
        """Initialize configuration error.

        Args:
            key: Configuration key at fault
            reason: Description of the problem
        """
        self.key = key
        self.reason = reason
        super().__init__(f"Invalid configuration for '{key}': {reason}")
