"""Closed-form benchmark geometries for the equal-variance case.

Every geometry here satisfies H^T H = (m/3) I exactly, so each is optimal
whenever the noise covariance is a multiple of the identity. They serve as
oracles for the iterative solver and as CLI-exposed starting points.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from rimu_opt.errors import InvalidSensorCount
from rimu_opt.model import FomKind, NoiseModel, SensorConfiguration, evaluate_fom
from rimu_opt.solver import SolverSettings, Solution, solve


class PlatonicSolid(enum.Enum):
    """Regular polyhedra whose unique face normals form optimal axis sets."""

    CUBE = "cube"
    OCTAHEDRON = "octahedron"
    DODECAHEDRON = "dodecahedron"
    ICOSAHEDRON = "icosahedron"


_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def orthogonal_triad() -> SensorConfiguration:
    """Three mutually orthogonal axes (the identity rows)."""
    return SensorConfiguration(np.eye(3))


def class_one_cone(m: int, phase: float = 0.0) -> SensorConfiguration:
    """m axes equally spaced on a cone of half-angle arccos(1/sqrt(3))."""
    if m < 3:
        raise InvalidSensorCount(f"class-I cone needs m >= 3, got {m}")
    cos_phi = 1.0 / math.sqrt(3.0)
    sin_phi = math.sqrt(1.0 - cos_phi * cos_phi)
    rows = np.empty((m, 3))
    for i in range(m):
        theta = phase + 2.0 * math.pi * i / m
        rows[i] = (sin_phi * math.cos(theta), sin_phi * math.sin(theta), cos_phi)
    return SensorConfiguration(rows)


def class_two_cone(m: int, phase: float = 0.0) -> SensorConfiguration:
    """One axis along the cone axis, m-1 equally spaced on the cone.

    The half-angle satisfies cos^2(phi) = (m-3)/(3m-3), which is what forces
    sum h_i h_i^T = (m/3) I once the axis sensor is included (m = 4 gives
    the tetrad with cos(phi) = 1/3). m = 3 collapses to an antiparallel
    in-plane pair, hence rank 2, and is rejected.
    """
    if m < 4:
        raise InvalidSensorCount(f"class-II cone needs m >= 4, got {m}")
    cos_phi = math.sqrt((m - 3.0) / (3.0 * m - 3.0))
    sin_phi = math.sqrt(1.0 - cos_phi * cos_phi)
    rows = np.empty((m, 3))
    rows[0] = (0.0, 0.0, 1.0)
    for i in range(m - 1):
        theta = phase + 2.0 * math.pi * i / (m - 1)
        rows[i + 1] = (sin_phi * math.cos(theta), sin_phi * math.sin(theta), cos_phi)
    return SensorConfiguration(rows)


def platonic_axes(solid: PlatonicSolid) -> SensorConfiguration:
    """Unique face-normal directions of a platonic solid (antipodes collapsed).

    Built from exact golden-ratio coordinates and normalized: cube -> 3 axes,
    octahedron -> 4, dodecahedron -> 6, icosahedron -> 10.
    """
    g = _GOLDEN
    if solid is PlatonicSolid.CUBE:
        rows = np.eye(3)
    elif solid is PlatonicSolid.OCTAHEDRON:
        rows = np.array(
            [
                [1.0, 1.0, 1.0],
                [1.0, 1.0, -1.0],
                [1.0, -1.0, 1.0],
                [1.0, -1.0, -1.0],
            ]
        )
    elif solid is PlatonicSolid.DODECAHEDRON:
        # Face normals of the dodecahedron point at icosahedron vertices.
        rows = np.array(
            [
                [0.0, 1.0, g],
                [0.0, 1.0, -g],
                [1.0, g, 0.0],
                [1.0, -g, 0.0],
                [g, 0.0, 1.0],
                [-g, 0.0, 1.0],
            ]
        )
    elif solid is PlatonicSolid.ICOSAHEDRON:
        # Face normals of the icosahedron point at dodecahedron vertices.
        inv_g = 1.0 / g
        rows = np.array(
            [
                [1.0, 1.0, 1.0],
                [1.0, 1.0, -1.0],
                [1.0, -1.0, 1.0],
                [1.0, -1.0, -1.0],
                [0.0, inv_g, g],
                [0.0, inv_g, -g],
                [inv_g, g, 0.0],
                [inv_g, -g, 0.0],
                [g, 0.0, inv_g],
                [-g, 0.0, inv_g],
            ]
        )
    else:
        raise InvalidSensorCount(f"unknown platonic solid {solid!r}")
    norms = np.sqrt((rows * rows).sum(axis=1))
    return SensorConfiguration(rows / norms[:, None])


_KIND_BUILDERS = {
    "triad": lambda m, phase: orthogonal_triad(),
    "class1": lambda m, phase: class_one_cone(_require_m(m, "class1"), phase),
    "class2": lambda m, phase: class_two_cone(_require_m(m, "class2"), phase),
    "cube": lambda m, phase: platonic_axes(PlatonicSolid.CUBE),
    "octahedron": lambda m, phase: platonic_axes(PlatonicSolid.OCTAHEDRON),
    "dodecahedron": lambda m, phase: platonic_axes(PlatonicSolid.DODECAHEDRON),
    "icosahedron": lambda m, phase: platonic_axes(PlatonicSolid.ICOSAHEDRON),
}


def _require_m(m: int | None, kind: str) -> int:
    if m is None:
        raise InvalidSensorCount(f"reference kind {kind!r} requires a sensor count")
    return m


def reference_kinds() -> tuple[str, ...]:
    return tuple(_KIND_BUILDERS)


def build_reference(kind: str, m: int | None = None, phase: float = 0.0) -> SensorConfiguration:
    """Build a named reference geometry.

    ``kind`` is one of triad, class1, class2, cube, octahedron, dodecahedron,
    icosahedron; cones additionally need ``m`` and accept a ``phase`` offset
    (a rotation about the cone axis, which changes no figure of merit).
    """
    try:
        builder = _KIND_BUILDERS[kind]
    except KeyError:
        raise InvalidSensorCount(f"unknown reference kind {kind!r}; choose from {reference_kinds()}")
    return builder(m, phase)


@dataclass(frozen=True)
class ReferenceComparison:
    """Figure-of-merit values of a reference geometry and a solver run."""

    reference_value: float
    solver_value: float
    gap: float
    reference: SensorConfiguration
    solution: Solution


def compare_against_reference(
    noise: NoiseModel,
    kind: str,
    fom: FomKind,
    m: int | None = None,
    phase: float = 0.0,
    settings: SolverSettings | None = None,
) -> ReferenceComparison:
    """Evaluate a reference geometry and the solver on the same instance.

    The gap is reference minus solver, so a converged solver yields a
    non-negative gap (up to its stopping tolerance) whenever the reference is
    optimal for the given noise.
    """
    reference = build_reference(kind, m if m is not None else noise.m, phase)
    if settings is None:
        settings = SolverSettings(fom=fom)
    elif settings.fom is not fom:
        raise ValueError("settings.fom disagrees with the requested figure of merit")
    ref_value = evaluate_fom(reference, noise, fom)
    solution = solve(noise, settings)
    return ReferenceComparison(
        reference_value=ref_value,
        solver_value=solution.objective,
        gap=ref_value - solution.objective,
        reference=reference,
        solution=solution,
    )
