"""Encoded computations chained from presentations to the final rank count."""

from .runner import FiberRun, Registry, Verdict, check_expectations

__all__ = ["FiberRun", "Registry", "Verdict", "check_expectations"]
