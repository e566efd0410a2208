"""Shared test oracles and random-instance generators.

Everything here is deliberately independent of the package internals: the
coherence oracle enumerates renewal patterns directly, the pure-state
concurrence uses the 2|ad - bc| determinant form, and reduced matrices are
computed with raw einsum contractions.
"""

from __future__ import annotations

import itertools

import numpy as np


def coherence_oracle(k, mu, sigma, mean_phase, signs):
    """-<exp(-i sum_j signs_j chi_j)>/2 by exact enumeration of keep/redraw patterns.

    Junction j is "keep" with probability mu; a kept junction merges step j
    into the previous block, whose phases are identical.  Each block of
    signed weight w contributes exp(-i w mean - w^2 sigma^2 / 2).
    """
    total = 0.0 + 0.0j
    for pattern in itertools.product((0, 1), repeat=k - 1):  # 1 = redraw
        prob = 1.0
        for bit in pattern:
            prob *= (1.0 - mu) if bit else mu
        weights = []
        current = signs[0]
        for j, bit in enumerate(pattern):
            if bit:
                weights.append(current)
                current = signs[j + 1]
            else:
                current += signs[j + 1]
        weights.append(current)
        value = 1.0 + 0.0j
        for w in weights:
            value *= np.exp(-1j * w * mean_phase - w * w * sigma * sigma / 2.0)
        total += prob * value
    return -0.5 * total


def pure_concurrence_oracle(amplitudes):
    """Concurrence 2|ad - bc| of a normalized two-qubit pure state."""
    a, b, c, d = amplitudes
    return 2.0 * abs(a * d - b * c)


def reduced_matrix_oracle(amplitudes, n_qubits, keep_positions):
    """Partial trace of a pure-state projector via raw tensor contraction."""
    psi = np.asarray(amplitudes).reshape((2,) * n_qubits)
    rho = np.tensordot(psi, psi.conj(), axes=0)
    keep = sorted(keep_positions)
    row = list(range(n_qubits))
    col = [i + n_qubits if i in keep else i for i in range(n_qubits)]
    out = [i for i in keep] + [i + n_qubits for i in keep]
    reduced = np.einsum(rho, row + col, out)
    dim = 2 ** len(keep)
    return reduced.reshape(dim, dim)


def random_x_state(rng):
    """Random valid density matrix with the X sparsity pattern."""
    diag = rng.dirichlet(np.ones(4))
    m = np.diag(diag).astype(complex)
    outer = rng.random() * np.sqrt(diag[0] * diag[3]) * np.exp(2j * np.pi * rng.random())
    inner = rng.random() * np.sqrt(diag[1] * diag[2]) * np.exp(2j * np.pi * rng.random())
    m[0, 3], m[3, 0] = outer, np.conj(outer)
    m[1, 2], m[2, 1] = inner, np.conj(inner)
    return m


def random_density_matrix(rng, dim=4):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return m / m.trace()


def random_pure_amplitudes(rng, dim=4):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_unitary(rng, dim=2):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))
