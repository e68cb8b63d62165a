"""Derivative-free trust-region optimizer (Powell's COBYLA, unconstrained).

The method keeps a simplex of n+1 interpolation points, fits the linear
model through them, and moves the best vertex by a steepest-descent step of
the model, capped at the working trust-region radius ``delta``.  Steps are
accepted or rejected on the actual objective reduction; the simplex is kept
well-shaped by explicit geometry steps; the resolution radius ``rho``
shrinks on a staged schedule from ``rhobeg`` down to ``rhoend``, at which
point the search stops.  ``delta`` may grow past ``rho`` after very
successful steps, which is what lets runs started with a tiny ``rhobeg``
still cover distance.

Structure and the specific update constants follow the modern reference
implementation of the algorithm; only the parts needed for unconstrained
objectives are kept (the linear-model trust-region step reduces to the
scaled negative model gradient).
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import InvalidInput, OptimizerFailure

# trust-region update constants (reference values)
_ETA1 = 0.1      # ratio below which the step counts as poor
_ETA2 = 0.7      # ratio above which the step counts as very successful
_GAMMA1 = 0.5    # contraction factor
_GAMMA2 = 2.0    # expansion factor
_GAMMA3 = 1.5    # delta is rounded down to rho when within this multiple


class CobylaResult(NamedTuple):
    x: np.ndarray
    fun: float
    n_evals: int


class _BudgetExhausted(Exception):
    pass


class _Evaluator:
    """Budgeted objective wrapper with best-seen tracking."""

    def __init__(self, objective, max_iter):
        self.objective = objective
        self.max_iter = max_iter
        self.n_evals = 0
        self.best_x = None
        self.best_f = np.inf

    def __call__(self, x):
        if self.n_evals >= self.max_iter:
            raise _BudgetExhausted
        value = self.objective(np.array(x, dtype=np.float64))
        try:
            value = float(value)
        except (TypeError, ValueError) as exc:
            raise OptimizerFailure(
                f"objective returned a non-numeric value: {value!r}",
                best_x=self.best_x, best_fun=self.best_f,
                n_evals=self.n_evals) from exc
        self.n_evals += 1
        if not np.isfinite(value):
            raise OptimizerFailure(
                f"objective returned a non-finite value ({value}) at "
                f"evaluation {self.n_evals}",
                best_x=self.best_x, best_fun=self.best_f,
                n_evals=self.n_evals)
        if value < self.best_f:
            self.best_f = value
            self.best_x = np.array(x, dtype=np.float64)
        return value


def _reduced_rho(rho, rhoend):
    """Staged resolution schedule: coarse tenths, then geometric, then end."""
    if rho > 250.0 * rhoend:
        return 0.1 * rho
    if rho <= 16.0 * rhoend:
        return rhoend
    return float(np.sqrt(rho * rhoend))


def cobyla_minimize(objective: Callable, x0, rhobeg=0.5, rhoend=1e-6,
                    max_iter=1000) -> CobylaResult:
    """Minimize ``objective`` starting at ``x0``; derivative-free.

    Stops after exactly ``max_iter`` objective evaluations or once the
    resolution radius falls below ``rhoend``; always returns the best point
    seen.  Raises OptimizerFailure (carrying the best-so-far point) if the
    objective produces a non-finite value.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.ndim != 1 or x0.size == 0:
        raise InvalidInput(f"x0 must be a non-empty 1-D vector, got shape {x0.shape}")
    if not np.all(np.isfinite(x0)):
        raise InvalidInput("x0 must be finite")
    rhobeg = float(rhobeg)
    rhoend = float(rhoend)
    if not 0.0 < rhoend < rhobeg:
        raise InvalidInput(f"need 0 < rhoend < rhobeg, got {rhoend}, {rhobeg}")
    max_iter = int(max_iter)
    if max_iter < 1:
        raise InvalidInput(f"max_iter must be >= 1, got {max_iter}")

    n = x0.size
    call = _Evaluator(objective, max_iter)
    points = np.empty((n + 1, n), dtype=np.float64)
    fvals = np.full(n + 1, np.inf)

    def build_vertex(row, x):
        points[row] = x
        fvals[row] = call(x)

    try:
        build_vertex(0, x0)
        for i in range(n):
            vertex = x0.copy()
            vertex[i] += rhobeg
            build_vertex(i + 1, vertex)

        rho = rhobeg
        delta = rhobeg
        # no-eval iterations only ever shrink delta/rho, so this cap is
        # a safety net, not a real limit
        for _ in range(100 * max_iter + 100):
            ib = int(np.argmin(fvals))
            pole = points[ib]
            fpole = fvals[ib]
            rest = [j for j in range(n + 1) if j != ib]
            sim = (points[rest] - pole).T          # columns = displacements
            try:
                simi = np.linalg.inv(sim)
            except np.linalg.LinAlgError:
                simi = None
            if simi is None or not np.all(np.isfinite(simi)):
                # degenerate simplex: rebuild it around the pole
                for k, row in enumerate(rest):
                    vertex = pole.copy()
                    vertex[k] += max(delta, rho)
                    build_vertex(row, vertex)
                continue

            distsq = np.sum(sim ** 2, axis=0)
            adequate_geo = bool(np.all(distsq <= 4.0 * delta ** 2))

            # linear interpolation model: g . sim[:, j] = f_j - f_pole
            g = simi.T @ (fvals[rest] - fpole)
            gnorm = float(np.linalg.norm(g))
            if gnorm > 0.0:
                d = (-delta / gnorm) * g
            else:
                d = np.zeros(n)
            dnorm = float(np.linalg.norm(d))
            shortd = dnorm <= 0.1 * rho
            prered = -float(g @ d)
            trfail = not prered > 0.0

            ratio = -1.0
            jdrop = None
            if shortd or trfail:
                delta *= 0.1
                if delta <= _GAMMA3 * rho:
                    delta = rho
            else:
                xnew = pole + d
                # reuse an existing value rather than re-evaluating a
                # numerically identical point
                dup = np.min(np.sum((points - xnew) ** 2, axis=1))
                if dup <= (1e-4 * rhoend) ** 2:
                    fnew = fvals[int(np.argmin(np.sum((points - xnew) ** 2, axis=1)))]
                else:
                    fnew = call(xnew)
                actrem = fpole - fnew
                ratio = actrem / prered

                if ratio <= _ETA1:
                    delta = _GAMMA1 * dnorm
                elif ratio <= _ETA2:
                    delta = max(_GAMMA1 * delta, dnorm)
                else:
                    delta = max(_GAMMA1 * delta, _GAMMA2 * dnorm)
                if delta <= _GAMMA3 * rho:
                    delta = rho

                # vertex replacement: weight distance from the new point
                # against the step's simplex coordinates
                simid = simi @ d
                dist_new = np.sum((sim - d[:, None]) ** 2, axis=0)
                weight = np.maximum(1.0, dist_new / max(delta, rho) ** 2)
                score = weight * np.abs(simid)
                ximproved = actrem > 0.0
                if ximproved:
                    jdrop = int(np.argmax(score)) if np.max(score) > 0.0 \
                        else int(np.argmax(dist_new))
                elif np.max(score) > 1.0:
                    jdrop = int(np.argmax(score))
                if jdrop is not None:
                    points[rest[jdrop]] = xnew
                    fvals[rest[jdrop]] = fnew

            bad_trstep = shortd or trfail or ratio <= 0.0 or jdrop is None
            improve_geo = bad_trstep and not adequate_geo
            reduce_rho = bad_trstep and adequate_geo and max(delta, dnorm) <= rho

            if improve_geo and not np.all(distsq <= 4.0 * delta ** 2):
                jgeo = int(np.argmax(distsq))
                row_dir = simi[jgeo, :]
                unit = row_dir / np.linalg.norm(row_dir)
                dgeo = 0.5 * delta * unit
                if float(g @ dgeo) > 0.0:
                    dgeo = -dgeo
                build_vertex(rest[jgeo], pole + dgeo)

            if reduce_rho:
                if rho <= rhoend:
                    break
                new_rho = _reduced_rho(rho, rhoend)
                delta = max(0.5 * rho, new_rho)
                rho = new_rho
    except _BudgetExhausted:
        pass

    if call.best_x is None:
        raise OptimizerFailure("no successful evaluation", n_evals=call.n_evals)
    return CobylaResult(call.best_x, call.best_f, call.n_evals)
