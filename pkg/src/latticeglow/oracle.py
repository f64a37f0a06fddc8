"""Brute-force ground truth by exact occupation-basis enumeration.

The geometry-weighted sum D = sum_i A_i n_i is diagonal in the occupation
basis, so every light observable is a classical expectation over the
probability distribution of occupation vectors.  This module enumerates
that distribution exactly for each supported state and evaluates arbitrary
moments of D (and raw site moments) by direct weighted summation.  It is
deliberately independent of the closed-form engine so the two can certify
each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import GeometryCoefficients
from .states import (
    COHERENT_PRODUCT,
    MOTT_INSULATOR,
    SUPERFLUID,
    AtomState,
)

DEFAULT_ENTRY_CAP = 10**7

# Multinomial weights are exact integer ratios up to this total size;
# beyond it, log-factorials are exponentiated.
_EXACT_MULTINOMIAL_LIMIT = 32


@dataclass(frozen=True)
class OccupationDistribution:
    """Probability-weighted occupation vectors of one atomic state.

    occupations has shape (n_entries, M) in lexicographic row order;
    probabilities are the matching weights.  truncation_deficit is the
    probability mass lost to truncation (zero except for the coherent
    product state, whose per-site Poisson tails are cut).
    """

    occupations: np.ndarray
    probabilities: np.ndarray
    truncation_deficit: float

    @property
    def n_sites(self) -> int:
        return self.occupations.shape[1]

    @property
    def n_entries(self) -> int:
        return self.occupations.shape[0]

    def entries(self):
        """Iterate (occupation tuple, probability) pairs."""
        for row, p in zip(self.occupations, self.probabilities):
            yield tuple(int(q) for q in row), float(p)

    @property
    def norm(self) -> float:
        return 1.0 - self.truncation_deficit


def _compositions(total: int, parts: int):
    # Lexicographically ascending occupation vectors summing to `total`.
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _superfluid_distribution(N: int, M: int, entry_cap: int) -> OccupationDistribution:
    count = math.comb(N + M - 1, M - 1)
    if count > entry_cap:
        raise ValueError(
            f"superfluid basis has {count} occupation vectors, above the "
            f"enumeration cap of {entry_cap}"
        )
    occ = np.array(list(_compositions(N, M)), dtype=np.int64)
    if N + M <= _EXACT_MULTINOMIAL_LIMIT:
        denom = M**N
        n_fact = math.factorial(N)
        probs = np.array(
            [
                (n_fact // math.prod(math.factorial(int(q)) for q in row)) / denom
                for row in occ
            ],
            dtype=np.float64,
        )
    else:
        log_n_fact = math.lgamma(N + 1)
        log_m = N * math.log(M)
        probs = np.array(
            [
                math.exp(
                    log_n_fact
                    - sum(math.lgamma(int(q) + 1) for q in row)
                    - log_m
                )
                for row in occ
            ],
            dtype=np.float64,
        )
    return OccupationDistribution(occ, probs, truncation_deficit=0.0)


def _poisson_cutoff(mean: float, tail_bound: float) -> int:
    # Smallest q_max whose Poisson tail beyond it is provably <= tail_bound,
    # using tail(q) <= p(q+1) * (q+2) / (q+2-mean) for q+2 > mean.
    q = max(0, math.ceil(mean))
    while True:
        log_p_next = -mean + (q + 1) * math.log(mean) - math.lgamma(q + 2)
        ratio = (q + 2) / (q + 2 - mean) if q + 2 > mean else math.inf
        if math.exp(log_p_next) * ratio <= tail_bound:
            return q
        q += 1


def _coherent_distribution(
    N: int, M: int, cutoff_tail: float, entry_cap: int
) -> OccupationDistribution:
    if not (0.0 < cutoff_tail <= 1e-6):
        raise ValueError(
            f"cutoff_tail must be in (0, 1e-6] for the coherent state, got {cutoff_tail}"
        )
    mean = N / M
    q_max = _poisson_cutoff(mean, cutoff_tail / M)
    count = (q_max + 1) ** M
    if count > entry_cap:
        raise ValueError(
            f"coherent basis needs {count} occupation vectors "
            f"({M} sites, occupations 0..{q_max}), above the enumeration "
            f"cap of {entry_cap}"
        )
    qs = np.arange(q_max + 1)
    site_weights = np.exp(
        -mean + qs * math.log(mean) - np.array([math.lgamma(q + 1) for q in qs])
    )
    occ = np.indices((q_max + 1,) * M).reshape(M, -1).T.astype(np.int64)
    probs = np.ones(count, dtype=np.float64)
    for col in range(M):
        probs *= site_weights[occ[:, col]]
    deficit = 1.0 - float(probs.sum())
    return OccupationDistribution(occ, probs, truncation_deficit=max(deficit, 0.0))


def enumerate_state(
    state: AtomState,
    cutoff_tail: float = 1e-12,
    entry_cap: int = DEFAULT_ENTRY_CAP,
) -> OccupationDistribution:
    """Exact occupation distribution of a state.

    Mott insulator: the single commensurate vector.  Superfluid: all
    compositions of N atoms into M sites with multinomial weights.
    Coherent product: a per-site Poisson grid truncated so the total lost
    mass stays below cutoff_tail (ignored for the other two states).
    """
    N, M = state.n_atoms, state.n_sites
    if state.kind == MOTT_INSULATOR:
        occ = np.full((1, M), N // M, dtype=np.int64)
        return OccupationDistribution(occ, np.array([1.0]), truncation_deficit=0.0)
    if state.kind == SUPERFLUID:
        return _superfluid_distribution(N, M, entry_cap)
    return _coherent_distribution(N, M, cutoff_tail, entry_cap)


@dataclass(frozen=True)
class DMoments:
    """Moments of D = sum_i A_i n_i evaluated over a distribution."""

    amp: complex
    intensity: float
    fourth: float
    quad_mean: float
    quad_var: float


def _window_matrix(dist: OccupationDistribution, coeffs: GeometryCoefficients) -> np.ndarray:
    first = coeffs.offset - 1
    last = first + coeffs.K
    if first < 0 or last > dist.n_sites:
        raise ValueError(
            f"coefficient window [{coeffs.offset}, {coeffs.offset + coeffs.K - 1}] "
            f"does not fit a {dist.n_sites}-site distribution"
        )
    return dist.occupations[:, first:last].astype(np.float64)


def _moments_from_parts(
    p: np.ndarray, norm: float, d_re: np.ndarray, d_im: np.ndarray, beta: float
) -> DMoments:
    d2 = d_re * d_re + d_im * d_im
    x = d_re * math.cos(beta) + d_im * math.sin(beta)
    quad_mean = float(p @ x) / norm
    return DMoments(
        amp=complex(float(p @ d_re), float(p @ d_im)) / norm,
        intensity=float(p @ d2) / norm,
        fourth=float(p @ (d2 * d2)) / norm,
        quad_mean=quad_mean,
        quad_var=float(p @ (x * x)) / norm - quad_mean * quad_mean,
    )


def oracle_d_moments(
    dist: OccupationDistribution,
    coeffs: GeometryCoefficients,
    beta: float = 0.0,
) -> DMoments:
    """Expectations of D, |D|^2, |D|^4 and of the beta quadrature of D.

    All results are renormalized by the retained probability mass, which
    compensates the coherent-state truncation.
    """
    window = _window_matrix(dist, coeffs)
    a = np.asarray(coeffs.a, dtype=np.complex128)
    # Two real products keep the occupation matrix in float64.
    d_re = window @ a.real.copy()
    d_im = window @ a.imag.copy()
    p = dist.probabilities
    return _moments_from_parts(p, float(p.sum()), d_re, d_im, beta)


_TENSOR_THRESHOLD = 200_000
_TENSOR_CHUNK = 100_000


def _site_moment_tensors(dist: OccupationDistribution):
    # Exact weighted occupation moments sum_q p(q) q_a q_b (q_c q_d) over
    # all site pairs/quadruples, accumulated in fixed-size row chunks so
    # the reduction order is deterministic.  Together with the first-order
    # vector these reproduce every D-moment up to fourth order by a small
    # contraction instead of a sweep over the full basis per geometry.
    m = dist.n_sites
    p = dist.probabilities
    t1 = np.zeros(m)
    t2 = np.zeros((m, m))
    t4 = np.zeros((m * m, m * m))
    for start in range(0, dist.n_entries, _TENSOR_CHUNK):
        q = dist.occupations[start : start + _TENSOR_CHUNK].astype(np.float64)
        pq = p[start : start + _TENSOR_CHUNK]
        b = np.einsum("ia,ib->iab", q, q).reshape(len(q), m * m)
        wq = q * pq[:, None]
        t1 += pq @ q
        t2 += wq.T @ q
        t4 += (b * pq[:, None]).T @ b
    return t1, t2, t4


def _moments_from_tensors(tensors, norm, coeffs: GeometryCoefficients, beta, m):
    t1, t2, t4 = tensors
    w = range(coeffs.offset - 1, coeffs.offset - 1 + coeffs.K)
    a = np.asarray(coeffs.a, dtype=np.complex128)
    t1w = t1[list(w)]
    t2w = t2[np.ix_(list(w), list(w))]
    pair_idx = [i * m + j for i in w for j in w]
    t4w = t4[np.ix_(pair_idx, pair_idx)]
    v = np.kron(a, a)
    amp = complex(a @ t1w) / norm
    intensity = float((np.conj(a) @ t2w @ a).real) / norm
    fourth = float((np.conj(v) @ t4w @ v).real) / norm
    x = a.real * math.cos(beta) + a.imag * math.sin(beta)
    quad_mean = float(x @ t1w) / norm
    quad_var = float(x @ t2w @ x) / norm - quad_mean * quad_mean
    return DMoments(amp, intensity, fourth, quad_mean, quad_var)


def oracle_d_moments_batch(
    dist: OccupationDistribution,
    coeffs_list,
    beta: float = 0.0,
) -> list[DMoments]:
    """oracle_d_moments for many coefficient sets over one distribution.

    Small bases are swept directly; large ones (the truncated coherent
    grids) are reduced once to exact site-moment tensors, after which each
    geometry costs a contraction of at most K^4 terms.
    """
    coeffs_list = list(coeffs_list)
    if not coeffs_list:
        return []
    if dist.n_entries < _TENSOR_THRESHOLD:
        return [oracle_d_moments(dist, c, beta) for c in coeffs_list]
    tensors = _site_moment_tensors(dist)
    norm = float(dist.probabilities.sum())
    m = dist.n_sites
    return [_moments_from_tensors(tensors, norm, c, beta, m) for c in coeffs_list]


def oracle_raw_moment(dist: OccupationDistribution, sites, powers) -> float:
    """Expectation of prod_r n_{site_r}^{power_r} over distinct sites."""
    sites = list(sites)
    powers = list(powers)
    if len(sites) != len(powers):
        raise ValueError("sites and powers must have equal length")
    if len(set(sites)) != len(sites):
        raise ValueError(f"site indices must be distinct, got {sites}")
    if any(s < 1 or s > dist.n_sites for s in sites):
        raise ValueError(f"site indices must lie in 1..{dist.n_sites}, got {sites}")
    values = np.ones(dist.n_entries, dtype=np.float64)
    for s, p in zip(sites, powers):
        values *= dist.occupations[:, s - 1].astype(np.float64) ** p
    return float(dist.probabilities @ values) / float(dist.probabilities.sum())


def write_distribution_csv(dist: OccupationDistribution, path) -> None:
    """Dump (q_1, ..., q_M, p) rows for debugging."""
    with open(path, "w", newline="") as fh:
        header = ",".join(f"q{i}" for i in range(1, dist.n_sites + 1))
        fh.write(f"{header},p\n")
        for occ, p in dist.entries():
            fh.write(",".join(str(q) for q in occ) + f",{p:.17g}\n")
