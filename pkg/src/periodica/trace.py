"""Numerical continuation of one-parameter framework motions.

The motion of a one-degree-of-freedom framework is followed by arclength in
the gauge-fixed coordinate vector (orbit velocities, then the lattice
velocity column-major).  Each step predicts along the unit tangent and
corrects with Newton iterations on the edge-length residuals, the anchor of
vertex 0, the per-step rotation gauge and a pseudo-arclength row.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from .errors import NotAuxeticAtStart, NotOneDof
from .geometry import PeriodicFramework, SymmetricMatrix, gram
from .rigidity import RANK_RTOL, _checked_rank, periodic_dof
from .auxetics import AuxeticVerdict, PSD_RTOL, gram_velocity, stationary_scale, verdict

#: Corrector Jacobians with smaller relative sigma_min count as singular.
SINGULARITY_RTOL = 1e-9


class TraceTermination(Enum):
    MAX_STEPS = "max_steps"
    SINGULARITY = "singular_configuration"
    CORRECTOR_DIVERGENCE = "corrector_divergence"


class BoundaryKind(Enum):
    CONE_CROSSING = "cone_crossing"
    SINGULARITY = "singularity"
    HORIZON = "horizon"


@dataclass(frozen=True)
class TraceConfig:
    """Continuation settings.

    ``seed`` picks the direction of increasing parameter at the start: +1
    follows the tangent whose Gram trace is nonnegative (the opening sense),
    -1 the opposite; an explicit coefficient vector is projected onto the
    tangent instead.  ``steps`` applies per direction.
    """

    step: float = 1e-2
    steps: int = 200
    corrector_tol: float = 1e-12
    max_corrector_iterations: int = 20
    seed: Union[int, np.ndarray] = 1
    psd_tol: float = PSD_RTOL
    bidirectional: bool = True

    def __post_init__(self):
        if self.step <= 0.0:
            raise ValueError("step must be positive")
        if self.corrector_tol <= 0.0 or self.psd_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.steps < 0 or self.max_corrector_iterations < 1:
            raise ValueError("step and iteration counts must be nonnegative")


@dataclass(frozen=True)
class PathSample:
    """One point of a traced motion.

    ``tangent`` is the unit gauge-fixed coordinate velocity oriented toward
    increasing tau; ``gram_velocity`` is the Gram tangent it induces.
    """

    tau: float
    positions: np.ndarray
    lattice: np.ndarray
    gram: SymmetricMatrix
    gram_velocity: SymmetricMatrix
    verdict: AuxeticVerdict
    tangent: np.ndarray


@dataclass(frozen=True)
class GramPath:
    """Samples of a traced motion, tau ascending, with termination reasons."""

    framework: PeriodicFramework
    config: TraceConfig
    samples: tuple
    termination_backward: TraceTermination
    termination_forward: TraceTermination

    def sample_at_zero(self) -> PathSample:
        for s in self.samples:
            if s.tau == 0.0:
                return s
        raise ValueError("path has no tau = 0 sample")

    def max_length_drift(self) -> float:
        """Largest relative edge-length deviation over all samples."""
        worst = 0.0
        for s in self.samples:
            for k, orbit in enumerate(self.framework.edge_orbits):
                vec = (s.positions[orbit.v] + s.lattice @ np.asarray(orbit.shift, float)
                       - s.positions[orbit.u])
                worst = max(worst, abs(np.linalg.norm(vec) - orbit.length) / orbit.length)
        return worst


@dataclass(frozen=True)
class AuxeticInterval:
    """Open parameter interval around tau = 0 with PSD Gram tangents."""

    tau_lo: float
    tau_hi: float
    lo_kind: BoundaryKind
    hi_kind: BoundaryKind


# ---------------------------------------------------------------------------
# state packing and residuals


def _pack(positions: np.ndarray, lattice: np.ndarray) -> np.ndarray:
    return np.concatenate([positions.ravel(), lattice.ravel(order="F")])


def _unpack(state: np.ndarray, n: int, d: int):
    return state[:n * d].reshape(n, d), state[n * d:].reshape(d, d, order="F")


def _edge_residuals(framework, positions, lattice) -> np.ndarray:
    res = np.zeros(framework.edge_orbit_count)
    for k, orbit in enumerate(framework.edge_orbits):
        vec = (positions[orbit.v] + lattice @ np.asarray(orbit.shift, float)
               - positions[orbit.u])
        res[k] = (vec @ vec - orbit.length ** 2) / (2.0 * orbit.length)
    return res


def _edge_jacobian(framework, positions, lattice) -> np.ndarray:
    n, d = positions.shape
    rows = np.zeros((framework.edge_orbit_count, n * d + d * d))
    for k, orbit in enumerate(framework.edge_orbits):
        g = np.asarray(orbit.shift, dtype=float)
        vec = positions[orbit.v] + lattice @ g - positions[orbit.u]
        rows[k, orbit.v * d:(orbit.v + 1) * d] += vec
        rows[k, orbit.u * d:(orbit.u + 1) * d] -= vec
        rows[k, n * d:] += np.outer(vec, g).ravel(order="F")
        rows[k] /= orbit.length
    return rows


def _pin_block(n: int, d: int) -> np.ndarray:
    rows = np.zeros((d, n * d + d * d))
    for a in range(d):
        rows[a, a] = 1.0
    return rows


def _skew_block(lattice_inv: np.ndarray, n: int, d: int) -> np.ndarray:
    rows = []
    for a in range(d):
        for b in range(a + 1, d):
            row = np.zeros(n * d + d * d)
            for c in range(d):
                row[n * d + a + c * d] += lattice_inv[c, b]
                row[n * d + b + c * d] -= lattice_inv[c, a]
            rows.append(row)
    return np.vstack(rows) if rows else np.zeros((0, n * d + d * d))


def _skew_residual(lattice, lattice_base, base_inv) -> np.ndarray:
    m = (lattice - lattice_base) @ base_inv
    d = lattice.shape[0]
    return np.array([m[a, b] - m[b, a] for a in range(d) for b in range(a + 1, d)])


def _tangent(framework, state, orient: Optional[np.ndarray] = None) -> Optional[np.ndarray]:
    """Unit gauge-fixed tangent at a state, or None when its dimension is
    not one (a singular configuration)."""
    n, d = framework.positions.shape
    positions, lattice = _unpack(state, n, d)
    rows = np.vstack([
        _edge_jacobian(framework, positions, lattice),
        _pin_block(n, d),
        _skew_block(np.linalg.inv(lattice), n, d),
    ])
    u, s, vt = np.linalg.svd(rows)
    rank = int(np.sum(s >= RANK_RTOL * max(rows.shape) * s[0]))
    if rows.shape[1] - rank != 1:
        return None
    t = vt[-1]
    if orient is not None and t @ orient < 0.0:
        t = -t
    return t


def _correct(framework, start, base_state, tangent, h, p0_ref, config):
    """Newton-correct a predicted state back onto the constraint set.

    Returns (state or None, singular flag); the flag reports a corrector
    Jacobian whose smallest singular value fell below 1e-9 of the largest.
    """
    n, d = framework.positions.shape
    _, lattice_base = _unpack(base_state, n, d)
    base_inv = np.linalg.inv(lattice_base)
    skew_rows = _skew_block(base_inv, n, d)
    pin_rows = _pin_block(n, d)
    y = start.copy()
    for _ in range(config.max_corrector_iterations):
        positions, lattice = _unpack(y, n, d)
        res = np.concatenate([
            _edge_residuals(framework, positions, lattice),
            positions[0] - p0_ref,
            _skew_residual(lattice, lattice_base, base_inv),
            [tangent @ (y - base_state) - h],
        ])
        if np.max(np.abs(res)) <= config.corrector_tol:
            jac = np.vstack([
                _edge_jacobian(framework, positions, lattice),
                pin_rows, skew_rows, tangent[None, :],
            ])
            s = np.linalg.svd(jac, compute_uv=False)
            return y, s[-1] < SINGULARITY_RTOL * s[0]
        jac = np.vstack([
            _edge_jacobian(framework, positions, lattice),
            pin_rows, skew_rows, tangent[None, :],
        ])
        delta, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        y = y + delta
    return None, False


def _settle(framework, state, p0_ref, config) -> Optional[np.ndarray]:
    """Project the starting state onto the constraint set (no arclength row)."""
    n, d = framework.positions.shape
    _, lattice_base = _unpack(state, n, d)
    base_inv = np.linalg.inv(lattice_base)
    skew_rows = _skew_block(base_inv, n, d)
    pin_rows = _pin_block(n, d)
    y = state.copy()
    for _ in range(config.max_corrector_iterations):
        positions, lattice = _unpack(y, n, d)
        res = np.concatenate([
            _edge_residuals(framework, positions, lattice),
            positions[0] - p0_ref,
            _skew_residual(lattice, lattice_base, base_inv),
        ])
        if np.max(np.abs(res)) <= config.corrector_tol:
            return y
        jac = np.vstack([
            _edge_jacobian(framework, positions, lattice), pin_rows, skew_rows])
        delta, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        y = y + delta
    return None


def _make_sample(framework, state, tangent, tau, config) -> PathSample:
    n, d = framework.positions.shape
    positions, lattice = _unpack(state, n, d)
    lattice_dot = tangent[n * d:].reshape(d, d, order="F")
    omega_dot = gram_velocity(lattice, lattice_dot)
    v = verdict(omega_dot, tol=config.psd_tol, stationary_tol=stationary_scale(lattice))
    positions = positions.copy()
    positions.setflags(write=False)
    lattice = lattice.copy()
    lattice.setflags(write=False)
    t = tangent.copy()
    t.setflags(write=False)
    return PathSample(
        tau=float(tau),
        positions=positions,
        lattice=lattice,
        gram=gram(lattice),
        gram_velocity=omega_dot,
        verdict=v,
        tangent=t,
    )


def _advance(framework, state, tangent, p0_ref, config, direction):
    """One continuation step of nominal size ``config.step`` along
    ``direction`` * tangent, halving on corrector failure down to step/64."""
    h = config.step
    for _ in range(7):
        signed = direction * h
        predicted = state + signed * tangent
        corrected, singular = _correct(
            framework, predicted, state, tangent, signed, p0_ref, config)
        if corrected is not None:
            if singular:
                return None, None, 0.0, TraceTermination.SINGULARITY
            new_tangent = _tangent(framework, corrected, orient=tangent)
            if new_tangent is None:
                return None, None, 0.0, TraceTermination.SINGULARITY
            # pseudo-arclength underestimates arclength by kappa^2 h^3 / 6
            phi = np.linalg.norm(new_tangent - tangent)
            dtau = h * (1.0 + phi * phi / 6.0)
            return corrected, new_tangent, dtau, None
        h *= 0.5
    return None, None, 0.0, TraceTermination.CORRECTOR_DIVERGENCE


def _initial_tangent(framework, state, config) -> np.ndarray:
    t = _tangent(framework, state)
    if t is None:
        raise NotOneDof("the starting configuration is singular")
    n, d = framework.positions.shape
    _, lattice = _unpack(state, n, d)
    omega_dot = gram_velocity(lattice, t[n * d:].reshape(d, d, order="F"))
    tr = float(np.trace(omega_dot.matrix))
    if abs(tr) > stationary_scale(lattice):
        if tr < 0.0:
            t = -t
    elif t[np.argmax(np.abs(t))] < 0.0:
        t = -t
    seed = config.seed
    if np.ndim(seed) == 0:
        if int(seed) < 0:
            t = -t
    else:
        if np.asarray(seed, dtype=float) @ t < 0.0:
            t = -t
    return t


def trace(framework: PeriodicFramework, config: TraceConfig = TraceConfig()) -> GramPath:
    """Follow the one-parameter motion of a one-dof framework.

    Samples are spaced by arclength ``config.step`` in the gauge-fixed
    coordinates, ``config.steps`` of them per direction (backward tracing is
    skipped when ``config.bidirectional`` is false).  Each direction halts on
    its step budget, on a singular configuration (tangent-space dimension
    change or corrector-matrix rank drop) or on corrector divergence after
    step halving; the reason is recorded per direction on the returned path.

    Raises
    ------
    NotOneDof
        If the framework does not have exactly one degree of freedom.
    """
    count = periodic_dof(framework)
    if count.f != 1:
        raise NotOneDof(f"framework has {count.f} degrees of freedom, expected 1")
    n, d = framework.positions.shape
    state = _pack(framework.positions, framework.lattice)
    p0_ref = framework.positions[0].copy()
    settled = _settle(framework, state, p0_ref, config)
    if settled is None:
        raise NotOneDof("the starting configuration does not satisfy its own constraints")
    state = settled

    t0 = _initial_tangent(framework, state, config)
    origin = _make_sample(framework, state, t0, 0.0, config)

    def march(direction):
        samples = []
        cur_state, cur_tangent, tau = state, t0, 0.0
        termination = TraceTermination.MAX_STEPS
        for _ in range(config.steps):
            nxt, tangent, dtau, reason = _advance(
                framework, cur_state, cur_tangent, p0_ref, config, direction)
            if reason is not None:
                termination = reason
                break
            tau += direction * dtau
            # sign continuity keeps the tangent oriented toward increasing tau
            # in both march directions
            samples.append(_make_sample(framework, nxt, tangent, tau, config))
            cur_state, cur_tangent = nxt, tangent
        return samples, termination

    forward, term_fwd = march(+1)
    if config.bidirectional:
        backward, term_bwd = march(-1)
    else:
        backward, term_bwd = [], TraceTermination.MAX_STEPS

    samples = tuple(reversed(backward)) + (origin,) + tuple(forward)
    return GramPath(
        framework=framework,
        config=config,
        samples=samples,
        termination_backward=term_bwd,
        termination_forward=term_fwd,
    )


def step_from(path: GramPath, sample: PathSample, delta: float) -> Optional[PathSample]:
    """Evaluate the motion at a signed pseudo-arclength offset from a sample.

    Used for interval bisection and finite-difference checks; returns None
    when the corrector fails or the offset lands on a singular configuration.
    """
    framework, config = path.framework, path.config
    state = _pack(sample.positions, sample.lattice)
    predicted = state + delta * sample.tangent
    corrected, singular = _correct(
        framework, predicted, state, sample.tangent, delta, framework.positions[0], config)
    if corrected is None or singular:
        return None
    tangent = _tangent(framework, corrected, orient=sample.tangent)
    if tangent is None:
        return None
    return _make_sample(framework, corrected, tangent, sample.tau + delta, config)


def _boundary_from_termination(reason: TraceTermination) -> BoundaryKind:
    if reason is TraceTermination.MAX_STEPS:
        return BoundaryKind.HORIZON
    return BoundaryKind.SINGULARITY


def auxetic_interval(path: GramPath, width: float = 1e-8) -> AuxeticInterval:
    """Locate the parameter interval around tau = 0 with PSD Gram tangents.

    Expands from the start sample in both directions.  Where the verdict
    flips between consecutive samples the crossing is refined by bisection
    (re-evaluating the motion between them) until the bracket is narrower
    than ``width``; otherwise the boundary is the trace horizon or the
    recorded singularity.

    Raises
    ------
    NotAuxeticAtStart
        If the tangent at tau = 0 is not strictly or weakly auxetic.
    """
    samples = path.samples
    zero = path.sample_at_zero()
    if not zero.verdict.admissible:
        raise NotAuxeticAtStart(f"tangent at tau = 0 is {zero.verdict.kind.value}")
    index = samples.index(zero)

    def refine(anchor: PathSample, lo: float, hi: float, sign: int) -> float:
        # invariant: anchor.tau + sign*lo admissible, anchor.tau + sign*hi not
        while hi - lo > width:
            mid = 0.5 * (lo + hi)
            probe = step_from(path, anchor, sign * mid)
            if probe is not None and probe.verdict.admissible:
                lo = mid
            else:
                hi = mid
        return anchor.tau + sign * 0.5 * (lo + hi)

    def scan(direction):
        run = samples[index + 1:] if direction > 0 else samples[index - 1::-1]
        previous = zero
        for s in run:
            if not s.verdict.admissible:
                tau = refine(previous, 0.0, abs(s.tau - previous.tau), direction)
                return tau, BoundaryKind.CONE_CROSSING
            previous = s
        termination = (path.termination_forward if direction > 0
                       else path.termination_backward)
        return previous.tau, _boundary_from_termination(termination)

    tau_hi, hi_kind = scan(+1)
    tau_lo, lo_kind = scan(-1)
    return AuxeticInterval(tau_lo=tau_lo, tau_hi=tau_hi, lo_kind=lo_kind, hi_kind=hi_kind)
