"""Gradient-based reconstruction: local hyperplane through a simplex of points."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import DegenerateNeighborhood, Estimate, MeshIndex, SingularSystem, TrainingSet
from .neighbors import CombinationPlan, Simplex, enumerate_combinations, is_extrapolation
from .solvers import LinearSystem, solve_linear_system


@dataclass(frozen=True)
class GradientVector:
    """Estimated partial derivatives at the reference point."""

    p: np.ndarray
    residual: float


def estimate_gradients(
    training: TrainingSet, simplex: Simplex, layer: int = 0
) -> GradientVector:
    """Solve the n-by-n difference system for the partial derivatives.

    Row m is (x_aux[m] - x_ref) with right-hand side (y_aux[m] - y_ref);
    axis-aligned neighborhoods reduce to plain difference quotients through
    the same pivoting solver.
    """
    ref = simplex.reference
    aux = list(simplex.auxiliaries)
    A = training.x[aux] - training.x[ref]
    b = training.y[aux, layer] - training.y[ref, layer]
    try:
        p, residual = solve_linear_system(LinearSystem(A=A, b=b))
    except SingularSystem as exc:
        raise DegenerateNeighborhood(str(exc)) from exc
    return GradientVector(p=p, residual=residual)


def extrapolate(
    ref_coords: np.ndarray,
    ref_y: float,
    gradients: GradientVector,
    query: np.ndarray,
) -> float:
    """Linear expansion from the reference point along the estimated gradients."""
    return float(ref_y + gradients.p @ (query - ref_coords))


def evaluate_gradient(
    training: TrainingSet,
    query,
    mesh: Optional[MeshIndex] = None,
    combinations: int = 1,
    layer: int = 0,
    plan: Optional[CombinationPlan] = None,
) -> Estimate:
    """Estimate the outcome at the query point, averaging over combinations.

    Each simplex in the plan contributes one extrapolated value; degenerate
    combinations are skipped and the survivors averaged with equal weight.
    """
    query = np.asarray(query, dtype=float)
    if plan is None:
        plan = enumerate_combinations(training, query, combinations, mesh)

    values = []
    residual = 0.0
    for simplex in plan.simplexes:
        try:
            g = estimate_gradients(training, simplex, layer)
        except DegenerateNeighborhood:
            continue
        values.append(
            extrapolate(
                training.x[simplex.reference],
                float(training.y[simplex.reference, layer]),
                g,
                query,
            )
        )
        residual = max(residual, g.residual)
    if not values:
        raise DegenerateNeighborhood("all point combinations were degenerate")

    return Estimate(
        y_hat=float(np.mean(values)),
        method="gradient",
        reference_index=plan.simplexes[0].reference,
        combinations_used=len(values),
        residual=residual,
        per_combination=tuple(values),
        extrapolated=is_extrapolation(training, query),
    )
