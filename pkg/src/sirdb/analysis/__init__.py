"""Dependency theory, normal-form checks, anomaly simulation, procedurality."""

from .anomaly import DENORMALIZED, SIR, AnomalyReport, simulate_anomaly
from .fds import FunctionalDependency, attribute_closure, derive_fds, detect_fd_violations
from .normal_forms import NormalFormReport, Violation, check_normal_forms, project_fds
from .procedurality import ProceduralityScore, delta, normalize, procedurality, ratio

__all__ = [
    "DENORMALIZED",
    "SIR",
    "AnomalyReport",
    "FunctionalDependency",
    "NormalFormReport",
    "ProceduralityScore",
    "Violation",
    "attribute_closure",
    "check_normal_forms",
    "delta",
    "derive_fds",
    "detect_fd_violations",
    "normalize",
    "procedurality",
    "project_fds",
    "ratio",
    "simulate_anomaly",
]
