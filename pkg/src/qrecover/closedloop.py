"""Qubit-environment coupling, environment measurement, and conditioned correction.

The pair starts in the singlet with a path qubit O in |u>.  O is rotated by
a weight-p gate, then controls a bit flip on B, leaving
sqrt(1-p) |psi-> |u> + sqrt(p) |phi-> |d>.  Measuring O in a basis rotated
by an angle theta in the u-d plane selects a two-member pure-state ensemble
for the pair; flipping B back on the "down" outcome turns that ensemble
into cos^2(theta) |psi-><psi-| + sin^2(theta) |phi-><phi-|, independent of
p, with concurrence |cos 2 theta|.

The measurement basis kets are cos(theta)|u> + sin(theta)|d> and
-sin(theta)|u> + cos(theta)|d>: a real rotation of the path basis.  That is
the convention under which the protocol reproduces the outcome
probabilities and recovered concurrences above; tests assert that rotating
the state and projecting onto |u>, |d> is equivalent to projecting onto the
rotated kets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entanglement import (
    PureStateEnsemble,
    concurrence,
    ensemble_average_eof,
    eof_from_concurrence,
)
from .states import (
    DensityMatrix,
    LocalOperator,
    PureState,
    SIGMA_X,
    SIGMA_Z,
    apply_local,
    apply_two_qubit,
    bell_state,
    bit_flip,
    kron_state,
    maximally_mixed,
    partial_trace,
)

REGISTER = ("A", "B", "O")
OUTCOME_LABELS = ("theta_u", "theta_d")


@dataclass(frozen=True)
class ClosedLoopParams:
    """Knobs of the feedback experiment.

    ``p`` is the environment rotation weight; ``p_prime``, when given, is the
    attenuation ratio p/(1-p) it was set through and must be consistent.
    """

    p: float
    theta: float = 0.0
    eta: float = 1.0
    p_prime: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p {self.p!r} outside [0, 1]")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta {self.eta!r} outside [0, 1]")
        if self.p_prime is not None:
            if self.p_prime < 0.0:
                raise ValueError(f"attenuation ratio {self.p_prime!r} must be >= 0")
            if abs(self.p - self.p_prime / (1.0 + self.p_prime)) > 1e-12:
                raise ValueError(
                    f"p {self.p!r} inconsistent with attenuation ratio {self.p_prime!r}"
                )

    @classmethod
    def from_p_prime(cls, p_prime: float, theta: float = 0.0, eta: float = 1.0):
        if p_prime < 0.0:
            raise ValueError(f"attenuation ratio {p_prime!r} must be >= 0")
        return cls(p=p_prime / (1.0 + p_prime), theta=theta, eta=eta, p_prime=p_prime)


@dataclass(frozen=True)
class MeasurementOutcome:
    """One branch of the environment measurement.

    ``post_state`` is None for a zero-probability branch.
    """

    label: str
    probability: float
    post_state: PureState | None


def environment_rotation(p: float) -> LocalOperator:
    """sqrt(1-p) sigma_z + sqrt(p) sigma_x on O; unitary for every p in [0, 1]."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p {p!r} outside [0, 1]")
    return LocalOperator("O", math.sqrt(1.0 - p) * SIGMA_Z + math.sqrt(p) * SIGMA_X)


def measurement_rotation(theta: float) -> LocalOperator:
    """Rotation applied to O so that projecting onto |u>, |d> afterwards
    measures in the theta-rotated basis."""
    c, s = math.cos(theta), math.sin(theta)
    return LocalOperator("O", np.array([[c, s], [-s, c]], dtype=complex))


def measurement_basis(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """The rotated basis kets (outcome u, outcome d) as 2-vectors."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([c, s], dtype=complex), np.array([-s, c], dtype=complex)


def controlled_bit_flip() -> np.ndarray:
    """4x4 gate on (B, O): flip B when O is |d>."""
    gate = np.zeros((4, 4), dtype=complex)
    for b in (0, 1):
        for o in (0, 1):
            flipped = b ^ o
            gate[(flipped << 1) | o, (b << 1) | o] = 1.0
    return gate


def initial_state() -> PureState:
    return kron_state(bell_state("psi_minus"), PureState(("O",), np.array([1.0, 0.0])))


def state_after_interaction(p: float) -> PureState:
    """Three-qubit state after the environment rotation and the controlled flip."""
    state = apply_local(initial_state(), environment_rotation(p))
    return apply_two_qubit(state, controlled_bit_flip(), ("B", "O"))


def interaction_closed_form(p: float) -> PureState:
    """sqrt(1-p)|psi->|u> + sqrt(p)|phi->|d>, written out directly."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p {p!r} outside [0, 1]")
    psi = bell_state("psi_minus").amplitudes
    phi = bell_state("phi_minus").amplitudes
    amps = np.zeros(8, dtype=complex)
    amps[0::2] = math.sqrt(1.0 - p) * psi
    amps[1::2] = math.sqrt(p) * phi
    return PureState(REGISTER, amps)


def _eta_blend(bell_part: np.ndarray, eta: float) -> DensityMatrix:
    mixed = maximally_mixed(("A", "B")).matrix
    return DensityMatrix(("A", "B"), eta * bell_part + (1.0 - eta) * mixed)


def uncontrolled_output(p: float, eta: float = 1.0) -> tuple[DensityMatrix, float]:
    """Pair state after tracing out the environment, and its concurrence."""
    rho_bell = partial_trace(state_after_interaction(p).projector(), ("A", "B"))
    rho = _eta_blend(rho_bell.matrix, eta)
    return rho, concurrence(rho)


def uncontrolled_concurrence_closed(p: float, eta: float = 1.0) -> float:
    """Closed form max{0, 2 eta |1 - 2p| - (1 - eta)} / 2."""
    return max(0.0, 2.0 * eta * abs(1.0 - 2.0 * p) - (1.0 - eta)) / 2.0


def measure_environment(p: float, theta: float) -> list[MeasurementOutcome]:
    """Both branches of the rotated-basis measurement of O.

    Mixing the branch projectors with their probabilities reproduces the
    traced-out state exactly.
    """
    rotated = apply_local(state_after_interaction(p), measurement_rotation(theta))
    slices = rotated.amplitudes.reshape(4, 2)
    outcomes = []
    for column, label in enumerate(OUTCOME_LABELS):
        vector = slices[:, column]
        probability = float(np.vdot(vector, vector).real)
        if probability <= 1e-14:
            outcomes.append(MeasurementOutcome(label, 0.0, None))
            continue
        post = PureState(("A", "B"), vector / math.sqrt(probability))
        outcomes.append(MeasurementOutcome(label, probability, post))
    return outcomes


def measurement_ensemble(p: float, theta: float) -> PureStateEnsemble:
    """The pure-state ensemble tagged by the measurement outcome."""
    members = [
        (outcome.probability, outcome.post_state)
        for outcome in measure_environment(p, theta)
        if outcome.post_state is not None
    ]
    return PureStateEnsemble(tuple(members))


def corrected_ensemble(p: float, theta: float) -> PureStateEnsemble:
    """The measured ensemble after flipping B back on the "down" outcome."""
    members = []
    for outcome in measure_environment(p, theta):
        if outcome.post_state is None:
            continue
        state = outcome.post_state
        if outcome.label == "theta_d":
            state = apply_local(state, bit_flip("B"))
        members.append((outcome.probability, state))
    return PureStateEnsemble(tuple(members))


def controlled_output(
    p: float, theta: float, eta: float = 1.0
) -> tuple[DensityMatrix, float]:
    """Pair state after measurement plus conditioned correction, and its concurrence."""
    bell_part = np.zeros((4, 4), dtype=complex)
    for probability, state in corrected_ensemble(p, theta).members:
        bell_part += probability * np.outer(state.amplitudes, state.amplitudes.conj())
    rho = _eta_blend(bell_part, eta)
    return rho, concurrence(rho)


def controlled_concurrence_closed(theta: float, eta: float = 1.0) -> float:
    """Closed form max{0, eta (1 + 2 |cos 2 theta|) - 1} / 2, independent of p."""
    return max(0.0, eta * (1.0 + 2.0 * abs(math.cos(2.0 * theta))) - 1.0) / 2.0


@dataclass(frozen=True)
class AssistanceScan:
    """Grid scan of the average post-measurement entanglement over theta."""

    thetas: np.ndarray
    eofs: np.ndarray
    best_index: int
    best_theta: float
    best_eof: float


def assistance_scan(p: float, n_theta: int = 181) -> AssistanceScan:
    """Average ensemble entanglement versus measurement angle on [0, pi/2].

    Returns the full curve and the maximizing angle; values within 1e-12 of
    the maximum count as ties, resolved toward the smallest angle.
    """
    if n_theta < 2:
        raise ValueError("n_theta must be >= 2")
    thetas = np.linspace(0.0, math.pi / 2.0, n_theta)
    eofs = np.array(
        [ensemble_average_eof(measurement_ensemble(p, theta)) for theta in thetas]
    )
    best = int(np.argmax(eofs >= eofs.max() - 1e-12))
    return AssistanceScan(
        thetas=thetas,
        eofs=eofs,
        best_index=best,
        best_theta=float(thetas[best]),
        best_eof=float(eofs[best]),
    )


def closed_loop_summary(params: ClosedLoopParams) -> dict:
    """Uncontrolled and controlled entanglement at one parameter point."""
    _, c_unco = uncontrolled_output(params.p, params.eta)
    _, c_cont = controlled_output(params.p, params.theta, params.eta)
    return {
        "p": params.p,
        "theta": params.theta,
        "eta": params.eta,
        "uncontrolled_concurrence": c_unco,
        "uncontrolled_eof": eof_from_concurrence(c_unco),
        "controlled_concurrence": c_cont,
        "controlled_eof": eof_from_concurrence(c_cont),
    }
