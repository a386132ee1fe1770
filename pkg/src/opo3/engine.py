"""Ensemble integration of the positive-P equations.

Trajectories are integrated in nondimensional time tau = gamma*t with
explicit Euler-Maruyama steps (optionally an exponentially propagated linear
pump part, scheme="exp_euler").  Each trajectory owns an independent,
counter-derived random stream: Generator(PCG64(SeedSequence(master_seed,
spawn_key=(trajectory_index,)))).  Noise is consumed in fixed step order per
trajectory and trajectories are assigned to fixed 256-trajectory blocks, so
results are bit-identical for any worker count.

Sampling: after `burn_steps`, the state is recorded every `int_steps` steps,
n_samples_per_traj times.  Each trajectory contributes its samples as one
batch to a moment accumulator; divergent trajectories are excluded entirely
and counted.  A run with more than 1% divergent trajectories is flagged
unreliable.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import (
    ModelParams,
    PhaseSpaceState,
    QuadratureSample,
    ValidityError,
    fixed_point,
)
from .moments import MomentAccumulator, opo_schema, state_channels

BLOCK_SIZE = 256          # trajectories per work unit, fixed for determinism
CHUNK_STEPS = 1024        # steps per noise buffer
DT_CEILING = 0.05         # dt * max(1, gamma_r) must not exceed this
MAX_DIVERGED_FRACTION = 0.01


@dataclass(frozen=True)
class NoiseIncrement:
    """Correlated Wiener increments for one step (scalars or arrays)."""

    dw1: complex
    dw2: complex
    dw1p: complex
    dw2p: complex


def sample_wiener_increments(rng: np.random.Generator, dt: float, size=None) -> NoiseIncrement:
    """Draw increments with <dw1 dw2> = <dw1p dw2p> = dt, all else zero."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    shape = (4,) if size is None else (4,) + tuple(np.atleast_1d(size))
    w = rng.standard_normal(shape) * math.sqrt(dt / 2.0)
    if size is None:
        return NoiseIncrement(
            dw1=complex(w[0], w[1]), dw2=complex(w[0], -w[1]),
            dw1p=complex(w[2], w[3]), dw2p=complex(w[2], -w[3]),
        )
    return NoiseIncrement(
        dw1=w[0] + 1j * w[1], dw2=w[0] - 1j * w[1],
        dw1p=w[2] + 1j * w[3], dw2p=w[2] - 1j * w[3],
    )


def _pump_factors(scheme: str, gamma_r: float, dt: float):
    if scheme == "euler":
        return 1.0 - gamma_r * dt, dt
    if scheme == "exp_euler":
        return math.exp(-gamma_r * dt), -math.expm1(-gamma_r * dt) / gamma_r
    raise ValueError(f"unknown scheme {scheme!r}")


def step_euler_maruyama(state: PhaseSpaceState, params: ModelParams, dt: float,
                        noise: NoiseIncrement, scheme: str = "euler") -> PhaseSpaceState:
    """Scalar reference step; the block kernels implement the same map."""
    eps, m = params.eps, params.mu / params.eps
    e_pump, phi = _pump_factors(scheme, params.gamma_r, dt)
    a0, a1, a2, a0p, a1p, a2p = (state.a0, state.a1, state.a2,
                                 state.a0p, state.a1p, state.a2p)
    r0 = np.sqrt(complex(eps * a0))
    r0p = np.sqrt(complex(eps * a0p))
    return PhaseSpaceState(
        a0=m + (a0 - m) * e_pump + phi * (-eps * a1 * a2),
        a1=a1 + dt * (-a1 + eps * a2p * a0) + r0 * noise.dw1,
        a2=a2 + dt * (-a2 + eps * a1p * a0) + r0 * noise.dw2,
        a0p=m + (a0p - m) * e_pump + phi * (-eps * a1p * a2p),
        a1p=a1p + dt * (-a1p + eps * a2 * a0p) + r0p * noise.dw1p,
        a2p=a2p + dt * (-a2p + eps * a1 * a0p) + r0p * noise.dw2p,
    )


@dataclass(frozen=True)
class SimConfig:
    """Ensemble run settings; None fields are resolved from the model.

    Auto rules: dt = 0.01/max(1, gamma_r); burn_in = 20/min(1-mu, gamma_r);
    sample_interval = 2/(1-mu).  Resolution fails for mu >= 1 and when
    explicit values violate the step-size ceiling (dt*max(1,gamma_r) <=
    0.05) or the burn-in / decorrelation floors (burn_in >=
    10/min(1-mu, gamma_r), sample_interval >= 1/(1-mu)).
    """

    dt: float | None = None
    burn_in: float | None = None
    sample_interval: float | None = None
    n_samples_per_traj: int = 64
    n_trajectories: int = 256
    master_seed: int = 12345
    divergence_threshold: float = 1e6
    scheme: str = "euler"

    def resolve(self, params: ModelParams) -> "ResolvedConfig":
        if params.mu >= 1.0:
            raise ValidityError("above threshold unsupported (mu >= 1)")
        if self.n_samples_per_traj < 1:
            raise ValueError("n_samples_per_traj must be >= 1")
        if self.n_trajectories < 1:
            raise ValueError("n_trajectories must be >= 1")
        if not (self.divergence_threshold > 0):
            raise ValueError("divergence_threshold must be positive")
        _pump_factors(self.scheme, params.gamma_r, 1.0)  # validates scheme
        slow = min(1.0 - params.mu, params.gamma_r)
        fast = max(1.0, params.gamma_r)
        dt = self.dt if self.dt is not None else 0.01 / fast
        if not (0.0 < dt < math.inf):
            raise ValueError("dt must be positive and finite")
        if dt * fast > DT_CEILING * (1 + 1e-9):
            raise ValidityError(
                f"dt={dt:g} too coarse: need dt*max(1,gamma_r) <= {DT_CEILING}"
            )
        burn_in = self.burn_in if self.burn_in is not None else 20.0 / slow
        interval = (self.sample_interval if self.sample_interval is not None
                    else 2.0 / (1.0 - params.mu))
        if burn_in * slow < 10.0 * (1 - 1e-9):
            raise ValidityError(
                f"burn_in={burn_in:g} too short: need >= {10.0 / slow:g}"
            )
        if interval * (1.0 - params.mu) < 1.0 * (1 - 1e-9):
            raise ValidityError(
                f"sample_interval={interval:g} too short: need >= "
                f"{1.0 / (1.0 - params.mu):g}"
            )
        burn_steps = max(1, math.ceil(burn_in / dt - 1e-9))
        int_steps = max(1, math.ceil(interval / dt - 1e-9))
        e_pump, phi_pump = _pump_factors(self.scheme, params.gamma_r, dt)
        return ResolvedConfig(
            dt=dt,
            burn_steps=burn_steps,
            int_steps=int_steps,
            n_samples_per_traj=self.n_samples_per_traj,
            n_trajectories=self.n_trajectories,
            master_seed=self.master_seed,
            divergence_threshold=self.divergence_threshold,
            scheme=self.scheme,
            e_pump=e_pump,
            phi_pump=phi_pump,
        )


@dataclass(frozen=True)
class ResolvedConfig:
    dt: float
    burn_steps: int
    int_steps: int
    n_samples_per_traj: int
    n_trajectories: int
    master_seed: int
    divergence_threshold: float
    scheme: str
    e_pump: float
    phi_pump: float

    @property
    def burn_in(self) -> float:
        return self.burn_steps * self.dt

    @property
    def sample_interval(self) -> float:
        return self.int_steps * self.dt

    @property
    def total_steps(self) -> int:
        return self.burn_steps + self.n_samples_per_traj * self.int_steps

    def sample_steps(self) -> np.ndarray:
        k = np.arange(1, self.n_samples_per_traj + 1, dtype=np.int64)
        return self.burn_steps + k * self.int_steps

    def sample_times(self) -> np.ndarray:
        return self.sample_steps() * self.dt

    def to_dict(self) -> dict:
        return {
            "dt": self.dt,
            "burn_in": self.burn_in,
            "sample_interval": self.sample_interval,
            "n_samples_per_traj": self.n_samples_per_traj,
            "n_trajectories": self.n_trajectories,
            "master_seed": self.master_seed,
            "divergence_threshold": self.divergence_threshold,
            "scheme": self.scheme,
        }


def _traj_rng(master_seed: int, traj_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(traj_index,))
    return np.random.Generator(np.random.PCG64(ss))


def _initial_block(initial_state, params: ModelParams, nb: int) -> np.ndarray:
    if initial_state is None:
        initial_state = fixed_point(params)
    if isinstance(initial_state, PhaseSpaceState):
        vec = initial_state.as_array()
    else:
        vec = np.asarray(initial_state, dtype=np.complex128).reshape(6)
    return np.repeat(vec[:, None], nb, axis=1)


def _run_block(params: ModelParams, rcfg: ResolvedConfig, traj_indices,
               initial_state=None):
    """Integrate one block; returns channel cube and divergence bookkeeping.

    cube: (12, B, n_samples) complex128 in moments.OPO_CHANNELS order, for
    every trajectory including ones that later diverge (callers filter).
    """
    stepper = _kernels.get_stepper()
    nb = len(traj_indices)
    state = _initial_block(initial_state, params, nb)
    alive = np.ones(nb, dtype=np.bool_)
    first_bad = np.full(nb, -1, dtype=np.int64)
    rngs = [_traj_rng(rcfg.master_seed, int(t)) for t in traj_indices]
    scale = math.sqrt(rcfg.dt / 2.0)
    thr2 = rcfg.divergence_threshold ** 2
    m_pump = params.mu / params.eps
    n = rcfg.n_samples_per_traj
    cube = np.empty((12, nb, n), dtype=np.complex128)
    sample_at = rcfg.sample_steps()

    step = 0
    next_sample = 0
    w = None
    while step < rcfg.total_steps:
        stop = rcfg.total_steps
        if next_sample < n:
            stop = int(sample_at[next_sample])
        while step < stop:
            c = min(CHUNK_STEPS, stop - step)
            if w is None or w.shape[0] != c:
                w = np.empty((c, 4, nb), dtype=np.float64)
            for j, rng in enumerate(rngs):
                w[:, :, j] = rng.standard_normal((c, 4))
            w *= scale
            stepper(state, w, alive, first_bad, params.eps, m_pump, rcfg.dt,
                    rcfg.e_pump, rcfg.phi_pump, thr2, step)
            step += c
        if next_sample < n and step == int(sample_at[next_sample]):
            # dead trajectories may hold non-finite frozen states; their
            # channels are filtered out downstream
            with np.errstate(invalid="ignore", over="ignore"):
                cube[:, :, next_sample] = state_channels(state, params)
            next_sample += 1
    return cube, alive, first_bad


@dataclass
class TrajectoryResult:
    """One trajectory's retained samples plus divergence bookkeeping."""

    samples: list
    diverged: bool
    first_bad_step: int
    discarded_samples: int

    @property
    def n_samples(self) -> int:
        return len(self.samples)


def simulate_trajectory(params: ModelParams, config: SimConfig,
                        trajectory_index: int = 0,
                        initial_state=None) -> TrajectoryResult:
    """Integrate a single trajectory and return its QuadratureSamples.

    Samples at or after the first divergent step are discarded; the state
    is frozen there and the trajectory flagged.
    """
    rcfg = config.resolve(params)
    cube, alive, first_bad = _run_block(params, rcfg, [trajectory_index],
                                        initial_state=initial_state)
    taus = rcfg.sample_times()
    steps = rcfg.sample_steps()
    diverged = not bool(alive[0])
    bad_step = int(first_bad[0])
    samples = []
    for k in range(rcfg.n_samples_per_traj):
        if diverged and steps[k] > bad_step:
            break
        x0, y0, x, y, xp, yp, a0, a0p, a1, a1p, a2, a2p = cube[:, 0, k]
        samples.append(QuadratureSample(
            x0=x0, y0=y0, x=x, y=y, xp=xp, yp=yp,
            n12=a1p * a1 * a2p * a2, n0=a0p * a0, t=float(taus[k]),
        ))
    return TrajectoryResult(
        samples=samples,
        diverged=diverged,
        first_bad_step=bad_step,
        discarded_samples=rcfg.n_samples_per_traj - len(samples),
    )


@dataclass
class EnsembleResult:
    """Merged moments plus run provenance for one ensemble integration."""

    moments: MomentAccumulator
    params: ModelParams
    config: ResolvedConfig
    n_trajectories: int
    n_diverged: int
    elapsed_seconds: float
    sample_times: np.ndarray
    diverged_indices: list
    samples: np.ndarray | None = None     # (12, kept_traj, n) when requested
    halves: tuple | None = None           # (first-half acc, second-half acc)

    @property
    def divergence_fraction(self) -> float:
        return self.n_diverged / self.n_trajectories

    @property
    def reliable(self) -> bool:
        return self.divergence_fraction <= MAX_DIVERGED_FRACTION

    def report(self, centering: str = "reference"):
        return self.moments.finalize(centering=centering)


def _block_payload(args):
    (params, rcfg, indices, init_vec) = args
    cube, alive, first_bad = _run_block(params, rcfg, indices,
                                        initial_state=init_vec)
    return cube, alive, first_bad


def run_ensemble(params: ModelParams, config: SimConfig, workers: int | None = None,
                 keep_samples: bool = False, collect_time_series: bool = False,
                 split_halves: bool = False, initial_state=None) -> EnsembleResult:
    """Integrate an ensemble and stream every trajectory into one accumulator.

    Work is split into fixed blocks of BLOCK_SIZE trajectories and merged in
    block order, so estimates do not depend on the worker count.  workers
    defaults to the OPO3_WORKERS environment variable, else 1.
    """
    t0 = time.perf_counter()
    rcfg = config.resolve(params)
    if workers is None:
        workers = int(os.environ.get("OPO3_WORKERS", "1") or "1")
    workers = max(1, workers)
    if initial_state is not None and isinstance(initial_state, PhaseSpaceState):
        initial_state = initial_state.as_array()

    nt = rcfg.n_trajectories
    blocks = [list(range(lo, min(lo + BLOCK_SIZE, nt)))
              for lo in range(0, nt, BLOCK_SIZE)]
    payloads = [(params, rcfg, idxs, initial_state) for idxs in blocks]

    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_block_payload, payloads))
    else:
        results = [_block_payload(p) for p in payloads]

    schema = opo_schema(params)
    acc = MomentAccumulator(schema, collect_per_sample=collect_time_series)
    half_a = MomentAccumulator(schema) if split_halves else None
    half_b = MomentAccumulator(schema) if split_halves else None
    n = rcfg.n_samples_per_traj
    kept_cubes = []
    n_diverged = 0
    diverged_indices = []
    for idxs, (cube, alive, first_bad) in zip(blocks, results):
        dead = np.flatnonzero(~alive)
        n_diverged += dead.size
        diverged_indices.extend(int(idxs[d]) for d in dead)
        kept = cube[:, alive, :]
        if kept.shape[1] == 0:
            continue
        acc.add_batches(kept)
        if split_halves and n >= 2:
            half_a.add_batches(kept[:, :, : n // 2])
            half_b.add_batches(kept[:, :, n // 2:])
        if keep_samples:
            kept_cubes.append(kept)

    samples = np.concatenate(kept_cubes, axis=1) if kept_cubes else None
    result = EnsembleResult(
        moments=acc,
        params=params,
        config=rcfg,
        n_trajectories=nt,
        n_diverged=n_diverged,
        elapsed_seconds=time.perf_counter() - t0,
        sample_times=rcfg.sample_times(),
        diverged_indices=diverged_indices,
        samples=samples,
        halves=(half_a, half_b) if split_halves else None,
    )
    return result


def integrate_batch(params: ModelParams, dt: float, normals: np.ndarray,
                    initial_states: np.ndarray, divergence_threshold: float = 1e6,
                    scheme: str = "euler"):
    """Drive a batch with caller-supplied standard normals; returns finals.

    normals has shape (n_steps, 4, B), unscaled; initial_states (6, B).
    Used for common-random-number convergence studies.  Returns
    (final_states, alive, first_bad).
    """
    normals = np.asarray(normals, dtype=np.float64)
    if normals.ndim != 3 or normals.shape[1] != 4:
        raise ValueError("normals must have shape (n_steps, 4, B)")
    state = np.array(initial_states, dtype=np.complex128)
    if state.shape != (6, normals.shape[2]):
        raise ValueError("initial_states must have shape (6, B)")
    nb = state.shape[1]
    alive = np.ones(nb, dtype=np.bool_)
    first_bad = np.full(nb, -1, dtype=np.int64)
    e_pump, phi_pump = _pump_factors(scheme, params.gamma_r, dt)
    stepper = _kernels.get_stepper()
    thr2 = divergence_threshold ** 2
    m_pump = params.mu / params.eps
    step = 0
    total = normals.shape[0]
    while step < total:
        c = min(CHUNK_STEPS, total - step)
        w = normals[step:step + c] * math.sqrt(dt / 2.0)
        stepper(state, np.ascontiguousarray(w), alive, first_bad,
                params.eps, m_pump, dt, e_pump, phi_pump, thr2, step)
        step += c
    return state, alive, first_bad
