"""Exception types shared across the package.

Every failure mode that callers are expected to handle gets its own class so
the CLI can map them onto stable exit codes (config errors vs. infeasible
searches) without string matching.
"""

from __future__ import annotations


class ClusterChainError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ClusterChainError):
    """A configuration document or command-line value could not be parsed."""


class InvalidConfigurationError(ClusterChainError):
    """A parameter value is outside its physical domain."""


class DesignInfeasibleError(ClusterChainError):
    """The requested design cannot be realised (e.g. too few fusion leaves)."""


class LocusInvalidError(ClusterChainError):
    """The analytic envelope locus is undefined for these coefficients."""


class NoInteriorMinimumError(ClusterChainError):
    """The exponent s(z) is monotone on the search bracket; no interior optimum."""


class NoCrossoverError(ClusterChainError):
    """The repeater envelope never exceeds the direct-transmission bound."""


class EmptyFeasibleSetError(ClusterChainError):
    """No (m, tree) candidate satisfies the resource-class constraint."""


class TargetUnreachableError(ClusterChainError):
    """The success-probability target cannot be met below the search ceiling."""


class CapTooSmallError(ClusterChainError):
    """A count-distribution cap truncates more probability mass than allowed."""
