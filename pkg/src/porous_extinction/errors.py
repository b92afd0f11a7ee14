"""Exception hierarchy shared by every module of the package."""
from __future__ import annotations


class PorousExtinctionError(Exception):
    """Base class for all package errors."""


class ParameterError(PorousExtinctionError, ValueError):
    """Exponents or geometry outside the admissible range."""


class DegenerateCoefficient(ParameterError):
    """The factor a*m*(a*m + N - 2) is not positive."""


class OutOfDomain(PorousExtinctionError, ValueError):
    """A radius lies outside the domain of a certificate."""


class RegimeError(PorousExtinctionError, ValueError):
    """An operation was requested outside its regime (e.g. sigma < sigma*)."""


class HypothesisError(PorousExtinctionError, ValueError):
    """A hypothesis of the extinction certificate is not satisfied."""


class ZeroData(PorousExtinctionError, ValueError):
    """The initial datum vanishes identically; the bound is vacuous."""


class HorizonError(PorousExtinctionError, ValueError):
    """A requested time lies beyond the recorded trajectory."""


class ConfigError(PorousExtinctionError, ValueError):
    """Malformed or inconsistent run configuration."""


class SolverAbort(PorousExtinctionError, RuntimeError):
    """Base class for failures raised while marching in time."""


class StabilityViolation(SolverAbort):
    """Time step exceeds the explicit diffusion bound."""


class NegativityError(SolverAbort):
    """A cell value fell below zero beyond rounding tolerance."""


class InvariantViolation(SolverAbort):
    """A per-step structural invariant (sup bound, mass balance) failed."""


class ComparisonViolation(SolverAbort):
    """The solution crossed the configured supersolution by more than the tolerance."""
