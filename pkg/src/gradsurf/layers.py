"""Vector-valued outcomes evaluated layer by layer."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import GradsurfError, MeshIndex, TrainingSet, ValidationError
from .gradient import evaluate_gradient
from .smooth import evaluate_smooth


@dataclass(frozen=True)
class LayeredResult:
    """One Estimate per outcome layer, assembled in layer order."""

    components: tuple

    @property
    def y_hat(self) -> tuple:
        return tuple(c.y_hat for c in self.components)


def evaluate_layers(
    training: TrainingSet,
    query,
    mesh: Optional[MeshIndex] = None,
    method: str = "smooth",
    combinations: int = 1,
    **kwargs,
) -> LayeredResult:
    """Evaluate every outcome layer independently and assemble the vector.

    Layers never mix: component j is exactly the scalar method applied to
    layer j's outcomes.  Per-layer failures propagate as the corresponding
    component's error.
    """
    components = []
    for layer in range(training.layer_count):
        if method == "gradient":
            est = evaluate_gradient(
                training, query, mesh=mesh, combinations=combinations,
                layer=layer, **kwargs,
            )
        elif method == "smooth":
            est = evaluate_smooth(training, query, mesh=mesh, layer=layer, **kwargs)
        else:
            raise ValidationError(f"unknown method {method!r}")
        components.append(est)
    return LayeredResult(components=tuple(components))
