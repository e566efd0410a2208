"""Correlated stroboscopic dephasing of one qubit of an entangled pair.

The noisy channel kicks qubit B at discrete steps k = 1..steps, adding a
random phase chi_k between its basis components.  Phases are Gaussian with
mean ``mean_phase`` and standard deviation ``sigma``; each chi_k repeats the
previous value with probability ``mu`` and is redrawn otherwise, which makes
``mu`` the correlation coefficient between adjacent phases.

Trajectory states use the convention that after k uncontrolled steps the
pair state is (|HV> - e^{i phi_k} |VH>) / sqrt(2) with phi_k the running
phase sum; after a mid-sequence bit flip on B ("echoed" control) the state
is (|HH> - e^{i psi_k} |VV>) / sqrt(2) where the phases acquired after the
flip enter psi_k with a minus sign.  With that convention the averaged
inner coherence of the uncontrolled state is -<e^{-i phi_k}>/2 and the
outer coherence of the echoed state is -<e^{-i psi_k}>/2, which is what the
closed forms in this module evaluate.

Reproducibility: Monte Carlo sampling is organized in fixed blocks of
``BLOCK_SIZE`` trajectories; block j draws from a fresh substream keyed by
(seed, j).  Results for a given (seed, n_samples) are bit-identical no
matter how many workers participate, because blocks are reduced in index
order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .states import DensityMatrix, PureState

BLOCK_SIZE = 4096
_INV_SQRT2 = 1.0 / math.sqrt(2.0)

CONTROL_KINDS = ("uncontrolled", "corrected", "echoed")
CORRECTION_VARIANTS = ("ideal", "hardware")


@dataclass(frozen=True)
class NoiseParams:
    """Parameters of the correlated random-phase process."""

    mu: float
    sigma: float
    mean_phase: float = math.pi / 2
    steps: int = 4
    clip_to_hardware: bool = False

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu {self.mu!r} outside [0, 1]")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma {self.sigma!r} must be positive")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps {self.steps!r} must be a positive integer")
        object.__setattr__(self, "steps", int(self.steps))


@dataclass(frozen=True)
class PhaseSequence:
    """One realization of the random phases, in radians."""

    phases: tuple[float, ...]

    def __post_init__(self):
        phases = tuple(float(x) for x in self.phases)
        if not all(math.isfinite(x) for x in phases):
            raise ValueError("phases must be finite")
        object.__setattr__(self, "phases", phases)


@dataclass(frozen=True)
class TrajectoryControl:
    """Which control is applied along a trajectory.

    ``echo_after_step`` is the step after which the bit flip acts for the
    echoed control; ``correct_after_step`` (default: the final step) is
    where the compensating phase is applied for the corrected control.  The
    ``correction_variant`` selects between appending the compensating phase
    after all noise steps ("ideal") or replacing the final noise step by it
    ("hardware"); both return the exact initial state.
    """

    kind: str = "uncontrolled"
    echo_after_step: int = 2
    correct_after_step: int | None = None
    correction_variant: str = "ideal"

    def __post_init__(self):
        if self.kind not in CONTROL_KINDS:
            raise ValueError(f"unknown control kind {self.kind!r}")
        if self.correction_variant not in CORRECTION_VARIANTS:
            raise ValueError(f"unknown correction variant {self.correction_variant!r}")
        if self.echo_after_step < 1:
            raise ValueError("echo_after_step must be >= 1")

    def resolved_correct_step(self, steps: int) -> int:
        return steps if self.correct_after_step is None else self.correct_after_step

    def validate_for(self, steps: int) -> None:
        if self.kind == "echoed" and not 1 <= self.echo_after_step < steps:
            raise ValueError(
                f"echo_after_step {self.echo_after_step} incompatible with {steps} steps"
            )
        if self.kind == "corrected" and not 1 <= self.resolved_correct_step(steps) <= steps:
            raise ValueError(
                f"correct_after_step {self.correct_after_step} incompatible with {steps} steps"
            )


UNCONTROLLED = TrajectoryControl(kind="uncontrolled")
CORRECTED = TrajectoryControl(kind="corrected")
ECHOED = TrajectoryControl(kind="echoed")


def _combine(fresh: np.ndarray, stay: np.ndarray, clip: bool) -> np.ndarray:
    """Turn independent draws plus keep-decisions into correlated sequences."""
    phases = fresh.copy()
    for k in range(1, phases.shape[1]):
        phases[:, k] = np.where(stay[:, k - 1], phases[:, k - 1], phases[:, k])
    if clip:
        np.clip(phases, 0.0, math.pi, out=phases)
    return phases


def sample_sequence(params: NoiseParams, rng: np.random.Generator) -> PhaseSequence:
    """Draw one phase sequence from an explicit random stream."""
    fresh = rng.normal(params.mean_phase, params.sigma, size=(1, params.steps))
    stay = rng.random(size=(1, params.steps - 1)) < params.mu
    return PhaseSequence(tuple(_combine(fresh, stay, params.clip_to_hardware)[0]))


def sample_phase_matrix(params: NoiseParams, n_samples: int, seed: int) -> np.ndarray:
    """(n_samples, steps) phase matrix assembled from the fixed block substreams."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    blocks = []
    for start in range(0, n_samples, BLOCK_SIZE):
        count = min(BLOCK_SIZE, n_samples - start)
        blocks.append(_block_phases(params, seed, start // BLOCK_SIZE, count))
    return np.vstack(blocks)


def _block_phases(params: NoiseParams, seed: int, block_index: int, count: int) -> np.ndarray:
    rng = np.random.default_rng([seed, block_index])
    fresh = rng.normal(params.mean_phase, params.sigma, size=(count, params.steps))
    stay = rng.random(size=(count, params.steps - 1)) < params.mu
    return _combine(fresh, stay, params.clip_to_hardware)


def _trajectory_amplitudes(
    phases: np.ndarray, k: int, control: TrajectoryControl
) -> np.ndarray:
    """Per-trajectory two-qubit amplitude rows for the state after step k."""
    steps = phases.shape[1]
    control.validate_for(steps)
    n = phases.shape[0]
    amps = np.zeros((n, 4), dtype=complex)
    if k == 0 or (control.kind == "corrected" and k == control.resolved_correct_step(steps)):
        amps[:, 1] = _INV_SQRT2
        amps[:, 2] = -_INV_SQRT2
    elif control.kind == "echoed" and k > control.echo_after_step:
        e = control.echo_after_step
        psi = phases[:, :e].sum(axis=1) - phases[:, e:k].sum(axis=1)
        amps[:, 0] = _INV_SQRT2
        amps[:, 3] = -np.exp(1j * psi) * _INV_SQRT2
    else:
        phi = phases[:, :k].sum(axis=1)
        amps[:, 1] = _INV_SQRT2
        amps[:, 2] = -np.exp(1j * phi) * _INV_SQRT2
    return amps


def trajectory_state(
    seq: PhaseSequence, k: int, control: TrajectoryControl = UNCONTROLLED
) -> PureState:
    """Pure state of the pair after step k of one noise realization.

    k = 0 is the initial singlet.  The corrected control returns the exact
    singlet at its correction step; the echoed control switches to the
    outer-coherence form once the flip has acted.
    """
    steps = len(seq.phases)
    if not 0 <= k <= steps:
        raise ValueError(f"step {k} outside 0..{steps}")
    row = np.asarray(seq.phases, dtype=float).reshape(1, steps)
    return PureState(("A", "B"), _trajectory_amplitudes(row, k, control)[0])


def correction_phase(seq: PhaseSequence, control: TrajectoryControl = CORRECTED) -> float:
    """The compensating phase the corrected control applies at its step."""
    steps = len(seq.phases)
    stop = control.resolved_correct_step(steps)
    if control.correction_variant == "hardware":
        return -float(np.sum(seq.phases[: stop - 1]))
    return -float(np.sum(seq.phases[:stop]))


@dataclass(frozen=True)
class MonteCarloMoments:
    """Averaged projector plus first and second moments of the live coherence."""

    mean_matrix: np.ndarray
    coherence_mean: complex
    coherence_square_mean: complex
    n_samples: int

    def coherence_std_error(self) -> float:
        """One-sigma error of |coherence_mean| along its own direction."""
        mag = abs(self.coherence_mean)
        if mag == 0.0 or self.n_samples < 2:
            return 0.0
        direction = self.coherence_mean / mag
        second = 0.5 * (0.25 + (self.coherence_square_mean * np.conj(direction) ** 2).real)
        variance = max(0.0, second - mag * mag)
        return float(math.sqrt(variance / self.n_samples))


def _block_moments(args):
    params, control, k, seed, block_index, count = args
    phases = _block_phases(params, seed, block_index, count)
    amps = _trajectory_amplitudes(phases, k, control)
    rho_sum = np.einsum("ni,nj->ij", amps, amps.conj())
    if control.kind == "echoed" and k > control.echo_after_step:
        z = amps[:, 0] * amps[:, 3].conj()
    else:
        z = amps[:, 1] * amps[:, 2].conj()
    return rho_sum, z.sum(), (z * z).sum()


def monte_carlo_moments(
    params: NoiseParams,
    control: TrajectoryControl,
    k: int,
    n_samples: int,
    seed: int,
    workers: int = 1,
) -> MonteCarloMoments:
    """Average the trajectory projectors over n_samples noise realizations."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if not 0 <= k <= params.steps:
        raise ValueError(f"step {k} outside 0..{params.steps}")
    control.validate_for(params.steps)
    tasks = []
    for start in range(0, n_samples, BLOCK_SIZE):
        count = min(BLOCK_SIZE, n_samples - start)
        tasks.append((params, control, k, seed, start // BLOCK_SIZE, count))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_block_moments, tasks))
    else:
        results = [_block_moments(t) for t in tasks]
    rho_total = np.zeros((4, 4), dtype=complex)
    z_total = 0.0 + 0.0j
    z2_total = 0.0 + 0.0j
    for rho_sum, z_sum, z2_sum in results:
        rho_total += rho_sum
        z_total += z_sum
        z2_total += z2_sum
    return MonteCarloMoments(
        mean_matrix=rho_total / n_samples,
        coherence_mean=z_total / n_samples,
        coherence_square_mean=z2_total / n_samples,
        n_samples=n_samples,
    )


def monte_carlo_rho(
    params: NoiseParams,
    control: TrajectoryControl,
    k: int,
    n_samples: int,
    seed: int,
    workers: int = 1,
) -> DensityMatrix:
    """Empirical mean of the trajectory projectors as a density matrix."""
    moments = monte_carlo_moments(params, control, k, n_samples, seed, workers)
    return DensityMatrix(("A", "B"), moments.mean_matrix)


def analytic_coherence_uncontrolled(
    k: int, mu: float, sigma: float, mean_phase: float = math.pi / 2
) -> complex:
    """Closed-form averaged inner coherence of the uncontrolled state, k = 1..4.

    Equals -<e^{-i (chi_1 + ... + chi_k)>}/2 over the correlated phase
    process; its magnitude never exceeds 1/2.
    """
    s2 = sigma * sigma
    pre = -0.5 * np.exp(-1j * k * mean_phase)
    if k == 1:
        return complex(pre * math.exp(-0.5 * s2))
    if k == 2:
        return complex(pre * math.exp(-2.0 * s2) * (mu + (1.0 - mu) * math.exp(s2)))
    if k == 3:
        return complex(
            pre
            * math.exp(-4.5 * s2)
            * (
                mu**2
                + 2.0 * mu * (1.0 - mu) * math.exp(2.0 * s2)
                + (1.0 - mu) ** 2 * math.exp(3.0 * s2)
            )
        )
    if k == 4:
        return complex(
            pre
            * math.exp(-8.0 * s2)
            * (
                mu**3
                + mu**2 * (1.0 - mu) * (2.0 * math.exp(3.0 * s2) + math.exp(4.0 * s2))
                + 3.0 * mu * (1.0 - mu) ** 2 * math.exp(5.0 * s2)
                + (1.0 - mu) ** 3 * math.exp(6.0 * s2)
            )
        )
    raise ValueError(f"step {k} outside 1..4")


def analytic_coherence_echoed(
    k: int, mu: float, sigma: float, mean_phase: float = math.pi / 2
) -> complex:
    """Closed-form averaged outer coherence of the echoed state, k = 3..4.

    Equals -<e^{-i (chi_1 + chi_2 - chi_3 [- chi_4])}>/2; at mu = 1, k = 4
    it is exactly -1/2 (complete phase cancellation).
    """
    s2 = sigma * sigma
    if k == 3:
        return complex(
            -0.5
            * np.exp(-1j * mean_phase)
            * math.exp(-0.5 * s2)
            * (
                mu**2
                + mu * (1.0 - mu) * (1.0 + math.exp(-2.0 * s2))
                + (1.0 - mu) ** 2 * math.exp(-s2)
            )
        )
    if k == 4:
        return complex(
            -0.5
            * (
                mu**3
                + mu**2 * (1.0 - mu) * (2.0 * math.exp(-s2) + math.exp(-4.0 * s2))
                + mu * (1.0 - mu) ** 2 * (2.0 * math.exp(-3.0 * s2) + math.exp(-s2))
                + (1.0 - mu) ** 3 * math.exp(-2.0 * s2)
            )
        )
    raise ValueError(f"step {k} outside 3..4")
