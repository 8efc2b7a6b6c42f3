"""Numeric kernels: dense Gauss elimination and a safeguarded Newton root finder."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .model import NoConvergence, SingularSystem, ValidationError

SINGULARITY_RTOL = 1e-12


@dataclass(frozen=True)
class LinearSystem:
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValidationError("matrix must be square")
        if b.shape != (A.shape[0],):
            raise ValidationError("right-hand side length must match matrix")
        if not (np.isfinite(A).all() and np.isfinite(b).all()):
            raise ValidationError("system contains non-finite entries")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)


def solve_linear_system(sys: LinearSystem) -> tuple[np.ndarray, float]:
    """Solve Ax = b by Gauss elimination with row partial pivoting.

    Returns the solution together with the infinity norm of the residual.
    Raises SingularSystem when a pivot falls below 1e-12 relative to the
    largest entry of its row block; callers treat that as a degenerate
    neighborhood and retry with a different point combination.
    """
    A = sys.A.copy()
    b = sys.b.copy()
    n = len(b)
    scale = np.abs(sys.A).max(axis=1)
    scale[scale == 0.0] = 1.0
    threshold = SINGULARITY_RTOL * scale.max()

    for k in range(n - 1):
        p = int(np.argmax(np.abs(A[k:, k]))) + k
        if abs(A[p, k]) <= threshold:
            raise SingularSystem(f"pivot {A[p, k]!r} below threshold at column {k}")
        if p != k:
            A[[k, p]] = A[[p, k]]
            b[[k, p]] = b[[p, k]]
        for i in range(k + 1, n):
            lam = A[i, k] / A[k, k]
            A[i, k + 1 :] -= lam * A[k, k + 1 :]
            b[i] -= lam * b[k]
    if abs(A[n - 1, n - 1]) <= threshold:
        raise SingularSystem("matrix is singular")

    x = np.empty(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - A[k, k + 1 :] @ x[k + 1 :]) / A[k, k]

    residual = float(np.abs(sys.A @ x - sys.b).max())
    return x, residual


@dataclass(frozen=True)
class RootProblem:
    """Scalar root-finding problem with derivative and optional bracket."""

    f: Callable[[float], float]
    df: Callable[[float], float]
    x0: float
    tol: float = 1e-9
    max_iter: int = 20
    bracket: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if self.tol <= 0:
            raise ValidationError("tolerance must be positive")
        if self.max_iter < 1:
            raise ValidationError("max iterations must be >= 1")


def find_root(p: RootProblem) -> tuple[float, int]:
    """Newton-Raphson from p.x0, falling back to bisection on the bracket.

    Convergence is declared when the step between successive iterates drops
    to p.tol or below.  When Newton diverges, stalls, or leaves the bracket,
    a sign-changing bracket (if available) is bisected to tolerance instead;
    with no sign change NoConvergence is raised.
    """
    x = float(p.x0)
    if p.f(x) == 0.0:
        return x, 0

    lo = hi = None
    if p.bracket is not None:
        lo, hi = float(p.bracket[0]), float(p.bracket[1])

    iterations = 0
    for _ in range(p.max_iter):
        fx = p.f(x)
        dfx = p.df(x)
        if dfx == 0.0 or not np.isfinite(dfx):
            break
        step = fx / dfx
        xn = x - step
        if lo is not None and not (lo <= xn <= hi):
            break
        iterations += 1
        if abs(step) <= p.tol:
            return xn, iterations
        x = xn

    return _bisect_fallback(p, iterations)


def _bisect_fallback(p: RootProblem, newton_iters: int) -> tuple[float, int]:
    if p.bracket is None:
        raise NoConvergence("Newton failed and no bracket was supplied")
    lo, hi = float(p.bracket[0]), float(p.bracket[1])
    flo, fhi = p.f(lo), p.f(hi)
    if flo == 0.0:
        return lo, newton_iters
    if fhi == 0.0:
        return hi, newton_iters
    if np.sign(flo) == np.sign(fhi):
        raise NoConvergence("no sign change on the bracket")
    iters = newton_iters
    while hi - lo > p.tol:
        iters += 1
        mid = 0.5 * (lo + hi)
        fm = p.f(mid)
        if fm == 0.0:
            return mid, iters
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
        if iters - newton_iters > 200:
            break
    return 0.5 * (lo + hi), iters
