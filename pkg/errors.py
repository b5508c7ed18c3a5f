# -*- coding: utf-8 -*-
"""
Error types shared by the sampling, simulation and analytic modules.
Front ends (main.py, api_server.py) turn these into diagnostics.
"""

from typing import Optional, Tuple


class MetaDistError(Exception):
    """Base class for all toolkit errors."""

    module = "core"


class ConfigError(MetaDistError, ValueError):
    """Invalid parameter or experiment config; names the offending field."""

    module = "config"

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class EmptyRealizationError(MetaDistError):
    """A sampled realization contains no base station at all."""

    module = "sir-core"


class DegenerateRealizationError(MetaDistError):
    """A base station sits exactly at the typical user."""

    module = "sir-core"


class QuadratureError(MetaDistError):
    """Numerical integration did not converge or diverged."""

    module = "analytic"

    def __init__(self, message: str, residual: Optional[float] = None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (achieved residual {residual:.3e})"
        super().__init__(message)


class GilPelaezError(QuadratureError):
    """Oscillatory Gil-Pelaez integral did not reach the requested tolerance."""

    def __init__(self, message: str, achieved: Optional[float] = None):
        self.achieved = achieved
        super().__init__(message, residual=achieved)


class GainRangeError(MetaDistError):
    """The PPP target moment is outside the empirically covered range."""

    module = "gains"

    def __init__(self, message: str, interval: Tuple[float, float]):
        self.interval = interval
        super().__init__(f"{message}; achievable interval [{interval[0]:.6g}, {interval[1]:.6g}]")


class TruncationError(MetaDistError):
    """Lattice sum truncated too early for the requested accuracy."""

    module = "metasim"

    def __init__(self, message: str, tail_bound: float):
        self.tail_bound = tail_bound
        super().__init__(f"{message} (tail bound {tail_bound:.3e})")


class UnsupportedProcessError(MetaDistError):
    """Operation is not defined for the given process kind."""

    module = "metasim"
