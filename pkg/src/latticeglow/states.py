"""Closed-form occupation moments for the three atomic states.

The states are a Mott insulator (per-site Fock states, commensurate
filling), a superfluid of N atoms delocalized over M sites, and a product
of per-site coherent states with the same mean filling.  All multi-site
raw moments <n_a^p n_b^q ...> over distinct sites follow from the
normal-ordered (falling-factorial) moments of each state via Stirling
numbers of the second kind.  Everything is evaluated in exact integer
arithmetic with a single float division at the end, so the results are
correctly rounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

MOTT_INSULATOR = "mott_insulator"
SUPERFLUID = "superfluid"
COHERENT_PRODUCT = "coherent_product"
STATE_KINDS = (MOTT_INSULATOR, SUPERFLUID, COHERENT_PRODUCT)

_STIRLING_BASE_ORDER = 16


@lru_cache(maxsize=None)
def _stirling_rows(order: int) -> tuple[tuple[int, ...], ...]:
    # rows[p][j] = S(p, j), the number of partitions of p objects into j
    # nonempty blocks; built once by the standard recurrence.
    rows = [(1,)]
    for p in range(1, order + 1):
        prev = rows[p - 1]
        row = [0] * (p + 1)
        for j in range(1, p + 1):
            row[j] = j * _row_get(prev, j) + _row_get(prev, j - 1)
        rows.append(tuple(row))
    return tuple(rows)


def _row_get(row, j):
    return row[j] if j < len(row) else 0


def stirling2(p: int, j: int) -> int:
    """Stirling number of the second kind S(p, j)."""
    if p < 0 or j < 0:
        raise ValueError("stirling2 arguments must be nonnegative")
    order = max(p, _STIRLING_BASE_ORDER)
    rows = _stirling_rows(order)
    return _row_get(rows[p], j)


def _falling_factorial(n: int, k: int) -> int:
    """n (n-1) ... (n-k+1) as an exact integer; 0 when k > n >= 0."""
    out = 1
    for c in range(k):
        out *= n - c
        if out == 0:
            return 0
    return out


@dataclass(frozen=True)
class AtomState:
    """One of the three atomic states, with N atoms over M lattice sites."""

    kind: str
    n_atoms: int
    n_sites: int

    def __post_init__(self):
        if self.kind not in STATE_KINDS:
            raise ValueError(f"state kind must be one of {STATE_KINDS}, got {self.kind!r}")
        if self.n_atoms < 1 or self.n_sites < 1:
            raise ValueError(
                f"need n_atoms >= 1 and n_sites >= 1, got {self.n_atoms}, {self.n_sites}"
            )
        if self.kind == MOTT_INSULATOR and self.n_atoms % self.n_sites != 0:
            # Commensurate filling only; vacancies are out of scope.
            raise ValueError(
                f"Mott insulator requires n_atoms divisible by n_sites, "
                f"got {self.n_atoms} atoms on {self.n_sites} sites"
            )

    @property
    def filling(self) -> float:
        """Mean atom number per site."""
        return self.n_atoms / self.n_sites

    @classmethod
    def mott_insulator(cls, n_atoms: int, n_sites: int) -> "AtomState":
        return cls(MOTT_INSULATOR, n_atoms, n_sites)

    @classmethod
    def superfluid(cls, n_atoms: int, n_sites: int) -> "AtomState":
        return cls(SUPERFLUID, n_atoms, n_sites)

    @classmethod
    def coherent_product(cls, n_atoms: int, n_sites: int) -> "AtomState":
        return cls(COHERENT_PRODUCT, n_atoms, n_sites)


def _validate_powers(state: AtomState, powers) -> list[int]:
    powers = list(powers)
    if not powers:
        raise ValueError("powers list must be nonempty")
    if any((not isinstance(p, int)) or p < 1 for p in powers):
        raise ValueError(f"powers must be positive integers, got {powers}")
    if len(powers) > state.n_sites:
        raise ValueError(
            f"{len(powers)} distinct sites requested but the state has "
            f"only {state.n_sites}"
        )
    return powers


def falling_factorial_moment(state: AtomState, powers) -> float:
    """Normal-ordered moment <prod_r b_r^dag^p_r b_r^p_r> over distinct sites.

    Superfluid: N(N-1)...(N-s+1)/M^s with s = sum of the powers (zero once
    s exceeds N).  Coherent product: (N/M)^s.  Mott insulator: the product
    of per-site falling factorials of the filling.
    """
    powers = _validate_powers(state, powers)
    N, M = state.n_atoms, state.n_sites
    s = sum(powers)
    if state.kind == SUPERFLUID:
        return _falling_factorial(N, s) / M**s
    if state.kind == COHERENT_PRODUCT:
        return N**s / M**s
    n = N // M
    num = 1
    for p in powers:
        num *= _falling_factorial(n, p)
    return float(num)


def _touchard_fraction(p: int, N: int, M: int) -> Fraction:
    # p-th raw moment of a Poisson variable with mean N/M.
    return sum(
        (Fraction(stirling2(p, j) * N**j, M**j) for j in range(1, p + 1)),
        start=Fraction(0),
    )


def raw_moment(state: AtomState, powers) -> float:
    """Raw moment <prod_r n_r^p_r> over distinct sites.

    Powers of the number operator are rewritten as falling factorials with
    Stirling-number weights, then evaluated with the state's
    normal-ordered moments.
    """
    powers = _validate_powers(state, powers)
    N, M = state.n_atoms, state.n_sites
    if state.kind == MOTT_INSULATOR:
        n = N // M
        return float(n ** sum(powers))
    if state.kind == COHERENT_PRODUCT:
        # Independent sites: the moment factorizes per site.
        out = Fraction(1)
        for p in powers:
            out *= _touchard_fraction(p, N, M)
        return float(out)
    # Superfluid: all cross terms share the falling factorial of N.
    total = Fraction(0)
    for js in product(*(range(1, p + 1) for p in powers)):
        weight = 1
        for p, j in zip(powers, js):
            weight *= stirling2(p, j)
        s = sum(js)
        total += Fraction(weight * _falling_factorial(N, s), M**s)
    return float(total)


@dataclass(frozen=True)
class MomentSet:
    """Site-index-independent occupation moments up to total order four.

    Multi-site entries that would need more distinct sites than the state
    has are None rather than zero.  var_site, cov_site and m2_minus_m11
    (the on-site second moment minus the distinct-site pair moment, the
    weight of the isotropic intensity term) are evaluated from the
    cancellation-free closed forms of each state rather than as float
    differences.
    """

    m1: float
    m2: float
    m4: float
    m11: float | None
    m31: float | None
    m22: float | None
    m211: float | None
    m1111: float | None
    var_site: float
    cov_site: float
    m2_minus_m11: float

    def require_fourth_order(self) -> None:
        """Raise if the entries used by the fourth-moment closed form are absent."""
        missing = [
            name
            for name in ("m11", "m31", "m22", "m211", "m1111")
            if getattr(self, name) is None
        ]
        if missing:
            raise MomentsUnavailableError(
                f"moments {missing} are undefined for this state "
                "(fewer distinct sites than the closed form needs); "
                "use the enumeration oracle instead"
            )


class MomentsUnavailableError(ValueError):
    """A closed form asked for a multi-site moment the state cannot define."""


def _site_variance(state: AtomState) -> float:
    N, M = state.n_atoms, state.n_sites
    if state.kind == MOTT_INSULATOR:
        return 0.0
    if state.kind == SUPERFLUID:
        return N * (M - 1) / M**2
    return N / M


def _site_covariance(state: AtomState) -> float:
    N, M = state.n_atoms, state.n_sites
    if state.kind == SUPERFLUID and M >= 2:
        return -N / M**2
    return 0.0


def _pair_moment_gap(state: AtomState) -> float:
    # <n^2> - <n_a n_b>: exactly the filling for the superfluid and the
    # coherent product, zero for the Mott insulator.
    if state.kind == MOTT_INSULATOR:
        return 0.0
    return state.n_atoms / state.n_sites


def moment_set(state: AtomState) -> MomentSet:
    """All moment entries used by the closed-form observables."""
    M = state.n_sites

    def multi(powers, sites_needed):
        return raw_moment(state, powers) if M >= sites_needed else None

    return MomentSet(
        m1=raw_moment(state, [1]),
        m2=raw_moment(state, [2]),
        m4=raw_moment(state, [4]),
        m11=multi([1, 1], 2),
        m31=multi([3, 1], 2),
        m22=multi([2, 2], 2),
        m211=multi([2, 1, 1], 3),
        m1111=multi([1, 1, 1, 1], 4),
        var_site=_site_variance(state),
        cov_site=_site_covariance(state),
        m2_minus_m11=_pair_moment_gap(state),
    )


def n_k_statistics(state: AtomState, K: int) -> tuple[float, float]:
    """Mean and variance of the atom number within a K-site window.

    Mott insulator: no fluctuations.  Superfluid: N K (M-K) / M^2, which
    vanishes at K = M because the total atom number is conserved.
    Coherent product: Poissonian, variance equal to the mean.
    """
    N, M = state.n_atoms, state.n_sites
    if not (1 <= K <= M):
        raise ValueError(f"K must satisfy 1 <= K <= M, got K={K}, M={M}")
    mean = N * K / M
    if state.kind == MOTT_INSULATOR:
        return mean, 0.0
    if state.kind == SUPERFLUID:
        return mean, N * K * (M - K) / M**2
    return mean, mean


def window_statistics(moments: MomentSet, weights) -> tuple[float, float]:
    """Mean and variance of a weighted occupation sum sum_i w_i n_i.

    Uses the equal per-site variance and equal distinct-site covariance of
    the supported states.
    """
    w = list(weights)
    sw = math.fsum(w)
    sw2 = math.fsum(x * x for x in w)
    mean = moments.m1 * sw
    var = moments.var_site * sw2 + moments.cov_site * (sw * sw - sw2)
    return mean, var
