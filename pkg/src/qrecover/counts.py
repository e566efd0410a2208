"""Simulated coincidence counting and Poissonian error propagation.

Two count groups are used to calibrate the feedback experiment: the
down/up-path split fixes the attenuation ratio p' = p/(1-p), and the
rotated-output split fixes the measurement angle theta.  Each count C
carries a Poissonian standard error sqrt(C); a zero count contributes zero
error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .closedloop import measure_environment, state_after_interaction

SPLIT_FIELDS = ("c_hh_d", "c_vv_d", "c_hv_u", "c_vh_u")
ANGLE_FIELDS = ("c_hv_1", "c_vh_1", "c_hv_0", "c_vh_0")


class EstimationError(ValueError):
    """The counts cannot support the requested estimate."""


@dataclass(frozen=True)
class CoincidenceCounts:
    """Nonnegative coincidence counts per outcome label.

    The ``_u``/``_d`` group (HH and VV on the down path, HV and VH on the up
    path) sets the attenuation ratio; the ``_0``/``_1`` group (HV and VH on
    the rotated output modes u and d) sets the measurement angle.
    """

    c_hh_d: int = 0
    c_vv_d: int = 0
    c_hv_u: int = 0
    c_vh_u: int = 0
    c_hv_1: int = 0
    c_vh_1: int = 0
    c_hv_0: int = 0
    c_vh_0: int = 0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if int(value) != value or value < 0:
                raise ValueError(f"count {f.name} = {value!r} must be a nonnegative integer")
            object.__setattr__(self, f.name, int(value))


def estimate_p_prime(counts: CoincidenceCounts) -> tuple[float, float]:
    """Attenuation ratio (C_hh_d + C_vv_d)/(C_hv_u + C_vh_u) and its error.

    The error follows from first-order propagation of sqrt(C) per count:
    delta^2 = C_hh_d/D^2 + C_hv_u S^2/D^4 + C_vv_d/D^2 + C_vh_u S^2/D^4
    with S the numerator and D the denominator sum.
    """
    numerator = counts.c_hh_d + counts.c_vv_d
    denominator = counts.c_hv_u + counts.c_vh_u
    if denominator <= 0:
        raise EstimationError("up-path counts sum to zero; ratio undefined")
    ratio = numerator / denominator
    variance = (
        counts.c_hh_d / denominator**2
        + counts.c_hv_u * numerator**2 / denominator**4
        + counts.c_vv_d / denominator**2
        + counts.c_vh_u * numerator**2 / denominator**4
    )
    return float(ratio), float(math.sqrt(variance))


def estimate_theta(counts: CoincidenceCounts) -> tuple[float, float]:
    """Measurement angle arctan(sqrt(R)) with R the mode-1/mode-0 count ratio.

    delta theta = (C_hv_0 + C_vh_0)^(-1/2) (1 + R)^(-1/2) / 2.
    """
    mode0 = counts.c_hv_0 + counts.c_vh_0
    if mode0 <= 0:
        raise EstimationError("mode-0 counts sum to zero; angle undefined")
    ratio = (counts.c_hv_1 + counts.c_vh_1) / mode0
    theta = math.atan(math.sqrt(ratio))
    delta = 0.5 / math.sqrt(mode0) / math.sqrt(1.0 + ratio)
    return float(theta), float(delta)


def simulate_counts(
    probabilities: dict[str, float], total_pairs: int, seed: int
) -> CoincidenceCounts:
    """Independent Poisson draws with means probability * total_pairs.

    Labels absent from ``probabilities`` stay zero.  Deterministic for a
    fixed seed; labels are drawn in the declared field order.
    """
    if int(total_pairs) != total_pairs or total_pairs < 1:
        raise ValueError(f"total_pairs {total_pairs!r} must be a positive integer")
    known = {f.name for f in fields(CoincidenceCounts)}
    unknown = set(probabilities) - known
    if unknown:
        raise ValueError(f"unknown count labels {sorted(unknown)}")
    for label, prob in probabilities.items():
        if prob < 0.0:
            raise ValueError(f"probability for {label} is negative: {prob!r}")
    rng = np.random.default_rng(seed)
    draws = {}
    for f in fields(CoincidenceCounts):
        prob = probabilities.get(f.name, 0.0)
        draws[f.name] = int(rng.poisson(prob * total_pairs)) if prob > 0.0 else 0
    return CoincidenceCounts(**draws)


def coincidence_probabilities(p: float, theta: float) -> dict[str, float]:
    """Per-label detection probabilities implied by the feedback protocol.

    The split group comes from the unrotated post-interaction state; the
    angle group from the rotated measurement branches.  The mode-1/mode-0
    ratio works out to tan^2(theta) for every p.
    """
    amps = state_after_interaction(p).amplitudes.reshape(2, 2, 2)  # (A, B, O)
    weight = np.abs(amps) ** 2
    probs = {
        "c_hh_d": float(weight[0, 0, 1]),
        "c_vv_d": float(weight[1, 1, 1]),
        "c_hv_u": float(weight[0, 1, 0]),
        "c_vh_u": float(weight[1, 0, 0]),
    }
    for outcome, suffix in zip(measure_environment(p, theta), ("0", "1")):
        if outcome.post_state is None:
            probs[f"c_hv_{suffix}"] = 0.0
            probs[f"c_vh_{suffix}"] = 0.0
            continue
        branch = np.abs(outcome.post_state.amplitudes) ** 2 * outcome.probability
        probs[f"c_hv_{suffix}"] = float(branch[1])
        probs[f"c_vh_{suffix}"] = float(branch[2])
    return probs
