"""Coupled fast-state / slow-weight network dynamics.

Between weight updates the neural state follows

    dx/dt = -c_n x + gamma_theta(A_p x) + B u(t)

with the weight matrix A_p frozen over the slot [p*tau, (p+1)*tau).  At
each slot boundary the weights take a Hebbian / anti-Hebbian step

    A_{p+1} = clip( C_a o A_p + sign(A) o phi(x x^T) )

where "o" is the entrywise product, phi is an odd sigmoid (tanh here),
positive edges add the correlation term and negative edges subtract it,
and the clip confines every entry to its sign-class interval.  Zero
entries (non-edges and the diagonal) stay zero forever, so the graph
topology is conserved.

The activation gamma_theta passes its argument unchanged outside the dead
zone [-theta, theta] and returns zero inside it (strict inequality at the
boundary).  Integration is classical fixed-step RK4 with dt dividing tau
exactly; the dead-zone kink is handled by step subdivision rather than
event detection, which the step-halving tests guard.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import SignedDigraph, max_in_degree

__all__ = [
    "DynamicsError",
    "SimulationDiverged",
    "ModelParams",
    "InputSignal",
    "Trajectory",
    "StabilityCondition",
    "gamma_theta",
    "phi_eval",
    "weight_update",
    "step_slot",
    "simulate",
    "stability_condition",
    "invariant_bound",
    "slot_matrix",
    "hurwitz_check",
]


class DynamicsError(ValueError):
    pass


class SimulationDiverged(RuntimeError):
    """State became non-finite during integration."""

    def __init__(self, t: float, slot: int):
        super().__init__(f"non-finite state at t={t:.6g} (slot {slot})")
        self.t = t
        self.slot = slot


@dataclass(frozen=True)
class ModelParams:
    """Scalar parameters of the hybrid model.

    c_n        leak rate (> 0)
    c_a_plus   decay factor for excitatory weights, in (0, 1]
    c_a_minus  decay factor for inhibitory weights, in (0, 1]
    theta      activation dead-zone half-width (>= 0)
    tau        weight-update interval in seconds
    dt         integrator step; must divide tau exactly
    u_max      amplitude bound every input waveform must respect
    phi        plasticity nonlinearity selector ("tanh")
    phi_scale  multiplier on phi; 0 freezes plasticity
    """

    c_n: float
    c_a_plus: float = 0.98
    c_a_minus: float = 0.98
    theta: float = 0.1
    tau: float = 0.2
    dt: float = 1e-3
    u_max: float = 5.0
    phi: str = "tanh"
    phi_scale: float = 1.0

    def __post_init__(self):
        if self.c_n <= 0:
            raise DynamicsError("c_n must be positive")
        # c_a = 1 is admitted so plasticity can be frozen for control runs
        for nm, v in (("c_a_plus", self.c_a_plus), ("c_a_minus", self.c_a_minus)):
            if not (0.0 < v <= 1.0):
                raise DynamicsError(f"{nm} must lie in (0, 1], got {v}")
        if self.theta < 0:
            raise DynamicsError("theta must be >= 0")
        if self.tau <= 0 or self.dt <= 0:
            raise DynamicsError("tau and dt must be positive")
        k = round(self.tau / self.dt)
        if k < 1 or abs(k * self.dt - self.tau) > 1e-9 * self.tau:
            raise DynamicsError(
                f"dt={self.dt} does not divide tau={self.tau} into whole steps"
            )
        if self.u_max < 0:
            raise DynamicsError("u_max must be >= 0")
        if self.phi != "tanh":
            raise DynamicsError(f"unknown plasticity function {self.phi!r}")

    @property
    def steps_per_slot(self) -> int:
        return round(self.tau / self.dt)


@dataclass(frozen=True)
class InputSignal:
    """One input node's waveform: zero, constant(value) or
    sine(amp, freq, phase) evaluated as amp * sin(freq * t + phase)."""

    kind: str = "zero"
    value: float = 0.0
    amp: float = 0.0
    freq: float = 0.0
    phase: float = 0.0

    @staticmethod
    def zero() -> "InputSignal":
        return InputSignal("zero")

    @staticmethod
    def constant(value: float) -> "InputSignal":
        return InputSignal("constant", value=float(value))

    @staticmethod
    def sine(amp: float, freq: float, phase: float = 0.0) -> "InputSignal":
        return InputSignal("sine", amp=float(amp), freq=float(freq), phase=float(phase))

    def __post_init__(self):
        if self.kind not in ("zero", "constant", "sine"):
            raise DynamicsError(f"unknown input kind {self.kind!r}")

    def bound(self) -> float:
        if self.kind == "constant":
            return abs(self.value)
        if self.kind == "sine":
            return abs(self.amp)
        return 0.0

    def __call__(self, t):
        if self.kind == "constant":
            return self.value * np.ones_like(np.asarray(t, dtype=float))
        if self.kind == "sine":
            return self.amp * np.sin(self.freq * np.asarray(t, dtype=float) + self.phase)
        return np.zeros_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class StabilityCondition:
    holds: bool
    margin: float
    d_in: int
    coupling_bound: float


@dataclass(frozen=True)
class Trajectory:
    """Sampled run of the hybrid model.

    states[k] is x(times[k]); weight_snapshots[p] is the matrix in force
    during slot p (snapshot 0 is the initial weights); slot_boundaries[p]
    indexes times at t = p*tau.  mask_schedule, when present, holds the
    per-slot availability mask applied to the weights during integration.
    """

    graph: SignedDigraph
    params: ModelParams
    times: np.ndarray
    states: np.ndarray
    weight_snapshots: np.ndarray
    slot_boundaries: np.ndarray
    mask_schedule: np.ndarray | None = None

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise DynamicsError("times must be strictly increasing")
        if self.states.shape != (len(self.times), self.graph.n_nodes):
            raise DynamicsError("states shape inconsistent with times and graph")

    @property
    def n_slots(self) -> int:
        return len(self.weight_snapshots) - 1

    def outputs(self) -> np.ndarray:
        return self.states @ self.graph.output_matrix().T

    def effective_weights(self, slot: int) -> np.ndarray:
        W = self.weight_snapshots[min(slot, len(self.weight_snapshots) - 1)]
        if self.mask_schedule is not None and slot < len(self.mask_schedule):
            return W * self.mask_schedule[slot]
        return W


def gamma_theta(v, theta: float):
    """Dead-zone activation: v where |v| > theta, else 0 (strict)."""
    v = np.asarray(v, dtype=float)
    out = np.where(np.abs(v) > theta, v, 0.0)
    return out if out.ndim else float(out)


def phi_eval(z, scale: float = 1.0):
    """Odd sigmoid with range (-1, 1); tanh, optionally scaled."""
    out = scale * np.tanh(np.asarray(z, dtype=float))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class _Compiled:
    """Matrices derived from a graph+params pair, reused across slots."""

    pos: np.ndarray
    neg: np.ndarray
    Ca: np.ndarray
    sign: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    B: np.ndarray


def _compile(g: SignedDigraph, params: ModelParams) -> _Compiled:
    S = g.sign_matrix()
    pos, neg = S > 0, S < 0
    Ca = np.where(pos, params.c_a_plus, 0.0) + np.where(neg, params.c_a_minus, 0.0)
    return _Compiled(pos, neg, Ca, S, g.lower_bound_matrix(),
                     g.upper_bound_matrix(), g.input_matrix())


def weight_update(
    A_p: np.ndarray,
    x_slot: np.ndarray,
    g: SignedDigraph,
    params: ModelParams,
) -> np.ndarray:
    """One Hebbian/anti-Hebbian step of the weight matrix.

    Positive edges gain phi(x_i x_j), negative edges lose it, each entry is
    clipped to its sign-class interval and zero entries stay zero.  A
    nonzero diagonal in A_p is rejected: self-coupling is carried by the
    leak term, not the weight matrix.
    """
    A_p = np.asarray(A_p, dtype=float)
    if np.any(np.diag(A_p) != 0.0):
        raise DynamicsError("weight matrix must have a zero diagonal")
    c = _compile(g, params)
    corr = phi_eval(np.outer(x_slot, x_slot), params.phi_scale)
    raw = c.Ca * A_p + c.sign * corr
    out = np.clip(raw, c.lower, c.upper)
    out[~(c.pos | c.neg)] = 0.0
    return out


def _u_vector(schedule: dict[int, InputSignal], g: SignedDigraph, t):
    """Stack input waveforms into the column order of the input matrix."""
    t = np.asarray(t, dtype=float)
    cols = []
    for k, _ in g.input_gains:
        sig = schedule.get(k)
        cols.append(sig(t) if sig is not None else np.zeros_like(t))
    if not cols:
        return np.zeros((0,) + t.shape)
    return np.stack(cols, axis=0)


def _validate_schedule(schedule, g: SignedDigraph, params: ModelParams):
    inputs = set(g.input_nodes)
    for k, sig in schedule.items():
        if k not in inputs:
            raise DynamicsError(f"input schedule targets non-input node {k}")
        if sig.bound() > params.u_max + 1e-12:
            raise DynamicsError(
                f"waveform at node {g.node_labels[k]} exceeds u_max={params.u_max}"
            )


def _integrate_slot(A_eff, c_n, bu_half, x0, dt, theta, t0, slot):
    """RK4 over one slot.  bu_half holds B@u on the half-step grid
    (2*steps+1 samples).  Returns the stacked states including x0."""
    steps = (bu_half.shape[0] - 1) // 2
    n = x0.shape[0]
    out = np.empty((steps + 1, n))
    out[0] = x0
    x = x0
    for k in range(steps):
        b0 = bu_half[2 * k]
        bh = bu_half[2 * k + 1]
        b1 = bu_half[2 * k + 2]
        k1 = -c_n * x + gamma_theta(A_eff @ x, theta) + b0
        xa = x + (0.5 * dt) * k1
        k2 = -c_n * xa + gamma_theta(A_eff @ xa, theta) + bh
        xb = x + (0.5 * dt) * k2
        k3 = -c_n * xb + gamma_theta(A_eff @ xb, theta) + bh
        xc = x + dt * k3
        k4 = -c_n * xc + gamma_theta(A_eff @ xc, theta) + b1
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = x
    if not np.all(np.isfinite(x)):
        raise SimulationDiverged(t0 + steps * dt, slot)
    return out


def step_slot(
    g: SignedDigraph,
    params: ModelParams,
    x0: np.ndarray,
    A_p: np.ndarray,
    schedule: dict[int, InputSignal],
    t_start: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate one slot with frozen weights.

    Returns (times, states) with states[0] = x0 and states[-1] the state at
    t_start + tau.  Raises SimulationDiverged on non-finite values.
    """
    _validate_schedule(schedule, g, params)
    steps = params.steps_per_slot
    dt = params.dt
    t_half = t_start + 0.5 * dt * np.arange(2 * steps + 1)
    u = _u_vector(schedule, g, t_half)  # (m, 2*steps+1)
    bu_half = (g.input_matrix() @ u).T if u.size else np.zeros((2 * steps + 1, g.n_nodes))
    states = _integrate_slot(np.asarray(A_p, float), params.c_n, bu_half,
                             np.asarray(x0, float), dt, params.theta, t_start, 0)
    times = t_start + dt * np.arange(steps + 1)
    return times, states


def simulate(
    g: SignedDigraph,
    params: ModelParams,
    schedule: dict[int, InputSignal],
    x0,
    horizon: float,
    mask_schedule: np.ndarray | None = None,
    require_stability: bool = False,
) -> Trajectory:
    """Run the hybrid model for `horizon` seconds (a multiple of tau).

    Alternates slot integration with weight updates; snapshots are the
    stored weight matrices at every boundary.  mask_schedule (n_slots x N x
    N boolean) zeroes intermittently unavailable entries during the flow of
    the affected slots only; the stored weights keep evolving on the full
    topology.
    """
    n = g.n_nodes
    x0 = np.broadcast_to(np.asarray(x0, dtype=float), (n,)).copy()
    P = round(horizon / params.tau)
    if P < 1 or abs(P * params.tau - horizon) > 1e-9 * max(horizon, 1.0):
        raise DynamicsError(f"horizon {horizon} is not a positive multiple of tau")
    if mask_schedule is not None:
        mask_schedule = np.asarray(mask_schedule, dtype=bool)
        if mask_schedule.shape != (P, n, n):
            raise DynamicsError("mask schedule must have shape (n_slots, N, N)")
    _validate_schedule(schedule, g, params)
    if require_stability:
        cond = stability_condition(g, params)
        if not cond.holds:
            raise DynamicsError(
                f"stability precondition violated (margin {cond.margin:.6g})"
            )

    A = g.adjacency_matrix()
    if np.any(np.diag(A) != 0.0):
        raise DynamicsError("dynamics require a zero-diagonal weight matrix "
                            "(self-loops are not simulatable)")
    c = _compile(g, params)
    steps = params.steps_per_slot
    dt = params.dt
    n_samples = P * steps + 1
    times = dt * np.arange(n_samples)
    states = np.empty((n_samples, n))
    states[0] = x0
    snapshots = np.empty((P + 1, n, n))
    snapshots[0] = A
    boundaries = steps * np.arange(P + 1)

    x = x0
    for p in range(P):
        t0 = p * params.tau
        t_half = t0 + 0.5 * dt * np.arange(2 * steps + 1)
        u = _u_vector(schedule, g, t_half)
        bu_half = (c.B @ u).T if u.size else np.zeros((2 * steps + 1, n))
        A_eff = A * mask_schedule[p] if mask_schedule is not None else A
        try:
            chunk = _integrate_slot(A_eff, params.c_n, bu_half, x, dt, params.theta, t0, p)
        except SimulationDiverged as exc:
            raise SimulationDiverged(exc.t, p) from None
        states[p * steps + 1 : (p + 1) * steps + 1] = chunk[1:]
        x = chunk[-1]
        corr = phi_eval(np.outer(x, x), params.phi_scale)
        A = np.clip(c.Ca * A + c.sign * corr, c.lower, c.upper)
        A[~(c.pos | c.neg)] = 0.0
        snapshots[p + 1] = A

    traj = Trajectory(g, params, times, states, snapshots, boundaries, mask_schedule)
    for arr in (traj.times, traj.states, traj.weight_snapshots):
        arr.setflags(write=False)
    return traj


def stability_condition(g: SignedDigraph, params: ModelParams) -> StabilityCondition:
    """Leak-versus-coupling margin: c_n - d_in * max(upper+, |lower-|)."""
    d_in = max_in_degree(g)
    bound = g.bounds.coupling_bound()
    margin = params.c_n - d_in * bound
    return StabilityCondition(margin > 0.0, margin, d_in, bound)


def invariant_bound(g: SignedDigraph, params: ModelParams) -> float:
    """Radius of the invariant box: ||B u||_inf over the stability margin.

    Requires the stability condition to hold; the box is every state vector
    with |x_i| below the returned value.
    """
    cond = stability_condition(g, params)
    if not cond.holds:
        raise DynamicsError(
            f"invariant set undefined: stability margin {cond.margin:.6g} <= 0"
        )
    if not g.input_gains:
        return 0.0
    bu = max(abs(b) for _, b in g.input_gains) * params.u_max
    return bu / cond.margin


def slot_matrix(c_n: float, A_p: np.ndarray) -> np.ndarray:
    """Linear flow matrix of one slot: -c_n I + A_p."""
    A_p = np.asarray(A_p, dtype=float)
    return -c_n * np.eye(A_p.shape[0]) + A_p


def hurwitz_check(M: np.ndarray, tol: float = 1e-10) -> tuple[bool, bool, float]:
    """(strictly diagonally dominant with negative diagonal, all eigenvalue
    real parts < -tol, max real part)."""
    M = np.asarray(M, dtype=float)
    diag = np.diag(M)
    off = np.abs(M).sum(axis=1) - np.abs(diag)
    dd = bool(np.all(diag < 0) and np.all(-diag > off))
    max_re = float(np.max(np.linalg.eigvals(M).real))
    return dd, max_re < -tol, max_re
