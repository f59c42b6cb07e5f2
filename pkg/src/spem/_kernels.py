"""Compiled inner loops for edge-sampled SGD on the projection matrix.

The embedding never materializes inside the kernels: each interaction reads
the two point rows of the mode basis, forms their current images under P,
and writes a rank-one update back into P.  All randomness comes from an
explicit xorshift64* state so deterministic runs are bit-reproducible.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_U64 = np.uint64
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


@njit(inline="always")
def _splitmix64(state):
    state = state + _U64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return state, z ^ (z >> _U64(31))


@njit(inline="always")
def _next_u64(state):
    state ^= state >> _U64(12)
    state ^= state << _U64(25)
    state ^= state >> _U64(27)
    return state, state * _U64(0x2545F4914F6CDD1D)


def seed_state(seed: int) -> np.ndarray:
    """Derive a nonzero xorshift state array from a 64-bit seed (host side)."""
    mask = (1 << 64) - 1
    s = int(seed) & mask

    def mix(v):
        v = (v + 0x9E3779B97F4A7C15) & mask
        z = v
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        return v, z ^ (z >> 31)

    s, z1 = mix(s)
    s, z2 = mix(s)
    state = (z1 ^ ((z2 << 1) & mask)) or 0x9E3779B97F4A7C15
    return np.array([state], dtype=np.uint64)


@njit(inline="always")
def _derive_state(seed):
    """Nonzero xorshift state from a uint64 seed (jitted side)."""
    s = seed
    s, z1 = _splitmix64(s)
    s, z2 = _splitmix64(s)
    state = z1 ^ (z2 << _U64(1))
    if state == _U64(0):
        state = _U64(0x9E3779B97F4A7C15)
    return state


@njit(inline="always")
def _uniform_index(state, n, exclude):
    """Uniform draw from {0..n-1} \\ {exclude} by rejection."""
    while True:
        state, bits = _next_u64(state)
        j = int(float(bits >> _U64(11)) * _INV53 * n)
        if j != exclude:
            return state, j


@njit(inline="always")
def _interact(P, U, i, j, yi, yj, g, uu, a, b, weight, repulsive,
              eps_rep, clip, alpha):
    """One pairwise update on P anchored at i; returns the loss term.

    Attractive updates (repulsive=False) move both endpoints with the
    analytic gradient of -log q; repulsive ones move only the anchor with
    the gradient of -weight*log(1-q), eps-guarded near d=0.  Gradients are
    clipped per coordinate before the rank-one application, and yi is kept
    in sync with P incrementally.
    """
    n, s = U.shape
    m = P.shape[1]
    d2 = 0.0
    for c in range(m):
        diff = yi[c] - yj[c]
        d2 += diff * diff
    dpb = d2 ** b
    denom = 1.0 + a * dpb

    if repulsive:
        rep = 1.0 - 1.0 / denom
        if rep < 1e-12:
            rep = 1e-12
        loss = -weight * np.log(rep)
    else:
        loss = weight * np.log(denom)

    if d2 <= 0.0:
        return loss

    if repulsive:
        coef = weight * (-2.0) * b / ((eps_rep + d2) * denom)
    else:
        coef = 2.0 * a * b * dpb / (d2 * denom)

    for c in range(m):
        gc = coef * (yi[c] - yj[c])
        if gc > clip:
            gc = clip
        elif gc < -clip:
            gc = -clip
        g[c] = gc

    if repulsive:
        for r in range(s):
            ur = alpha * U[i, r]
            for c in range(m):
                P[r, c] -= ur * g[c]
        for c in range(m):
            yi[c] -= alpha * uu * g[c]
    else:
        uij = 0.0
        for r in range(s):
            uij += U[i, r] * U[j, r]
        for r in range(s):
            ur_i = alpha * U[i, r]
            ur_j = alpha * U[j, r]
            for c in range(m):
                # endpoint j feels the opposite gradient
                P[r, c] -= (ur_i - ur_j) * g[c]
        for c in range(m):
            yi[c] -= alpha * (uu - uij) * g[c]
    return loss


@njit(cache=True)
def run_epoch(P, U, heads, tails, next_sample, eps_per_edge, epoch,
              a, b, gamma_per_neg, n_neg, clip, eps_rep, alpha, state_arr):
    """Sequential pass over the due edges of one epoch (deterministic).

    ``state_arr`` is a length-1 uint64 array mutated in place so the RNG
    stream threads across epochs without boxing round-trips.
    """
    n, s = U.shape
    m = P.shape[1]
    yi = np.empty(m)
    yj = np.empty(m)
    g = np.empty(m)
    state = state_arr[0]
    loss = 0.0
    count = 0
    for e in range(heads.shape[0]):
        if next_sample[e] > epoch:
            continue
        next_sample[e] += eps_per_edge[e]
        i = heads[e]
        j = tails[e]
        for c in range(m):
            acc_i = 0.0
            acc_j = 0.0
            for r in range(s):
                acc_i += U[i, r] * P[r, c]
                acc_j += U[j, r] * P[r, c]
            yi[c] = acc_i
            yj[c] = acc_j
        uu = 0.0
        for r in range(s):
            uu += U[i, r] * U[i, r]
        loss += _interact(P, U, i, j, yi, yj, g, uu, a, b, 1.0,
                          False, eps_rep, clip, alpha)
        for _ in range(n_neg):
            state, jn = _uniform_index(state, n, i)
            for c in range(m):
                acc = 0.0
                for r in range(s):
                    acc += U[jn, r] * P[r, c]
                yj[c] = acc
            loss += _interact(P, U, i, jn, yi, yj, g, uu, a, b,
                              gamma_per_neg, True, eps_rep, clip, alpha)
        count += 1 + n_neg
    state_arr[0] = state
    return loss, count


@njit(cache=True, parallel=True)
def run_epoch_relaxed(P, U, heads, tails, next_sample, eps_per_edge, epoch,
                      a, b, gamma_per_neg, n_neg, clip, eps_rep, alpha, seed):
    """Racy parallel variant: edges update P concurrently without locks.

    Each edge derives its own RNG stream from (seed, epoch, edge), so the
    sampled negatives are well-defined even though the update interleaving
    is not reproducible.
    """
    n, s = U.shape
    m = P.shape[1]
    n_edges = heads.shape[0]
    loss = 0.0
    count = 0
    for e in prange(n_edges):
        if next_sample[e] > epoch:
            continue
        next_sample[e] += eps_per_edge[e]
        state = _derive_state(seed ^ _U64(epoch) * _U64(0x9E3779B97F4A7C15)
                              ^ _U64(e) * _U64(0xBF58476D1CE4E5B9))
        yi = np.empty(m)
        yj = np.empty(m)
        g = np.empty(m)
        i = heads[e]
        j = tails[e]
        for c in range(m):
            acc_i = 0.0
            acc_j = 0.0
            for r in range(s):
                acc_i += U[i, r] * P[r, c]
                acc_j += U[j, r] * P[r, c]
            yi[c] = acc_i
            yj[c] = acc_j
        uu = 0.0
        for r in range(s):
            uu += U[i, r] * U[i, r]
        loss += _interact(P, U, i, j, yi, yj, g, uu, a, b, 1.0,
                          False, eps_rep, clip, alpha)
        for _ in range(n_neg):
            state, jn = _uniform_index(state, n, i)
            for c in range(m):
                acc = 0.0
                for r in range(s):
                    acc += U[jn, r] * P[r, c]
                yj[c] = acc
            loss += _interact(P, U, i, jn, yi, yj, g, uu, a, b,
                              gamma_per_neg, True, eps_rep, clip, alpha)
        count += 1 + n_neg
    return loss, count
