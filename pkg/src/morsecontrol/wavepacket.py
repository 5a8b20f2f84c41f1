"""Phase-locked vibrational wave packets built from Morse bound states.

A binomial SU(2)-style coherent ladder over the lowest levels is split into
even-level and odd-level subsidiary packets, each renormalized to unit norm.
The control phase theta mixes them coherently:

    state(theta, t) = 0.5*(1 - exp(i*theta))*even_packet(t)
                    + 0.5*(1 + exp(i*theta))*odd_packet(t)

so theta = 0 returns the odd packet and theta = pi the even one, and the
norm is exactly 1 for every theta because the two packets are orthogonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DegenerateSplitError, GridError, InvalidParameterError
from .morse import MorseParams, eigenfunction_table, energies

NORM_TOL = 1e-12


def su2_coefficients(alpha: float, n_max: int) -> "CoefficientSet":
    """Binomial coherent-ladder amplitudes sqrt(C(n_max, m)) * alpha**m / (1+alpha**2)**(n_max/2).

    Computed in log space so the binomials stay finite for any n_max, then
    renormalized so the squared amplitudes sum to one exactly.
    """
    if n_max < 1:
        raise InvalidParameterError(f"n_max must be >= 1, got {n_max}")
    m = np.arange(n_max + 1)
    if alpha == 0.0:
        c = np.zeros(n_max + 1)
        c[0] = 1.0
    else:
        log_binom = 0.5 * (gammaln(n_max + 1) - gammaln(m + 1) - gammaln(n_max - m + 1))
        log_c = log_binom + m * math.log(abs(alpha)) - 0.5 * n_max * math.log1p(alpha * alpha)
        sign = np.where(m % 2 == 1, math.copysign(1.0, alpha), 1.0)
        c = sign * np.exp(log_c - log_c.max())
    c = c / math.sqrt(float(np.sum(c * c)))
    return CoefficientSet(alpha=alpha, n_max=n_max, amplitudes=c)


def split_even_odd(coeffs: "CoefficientSet") -> "CoefficientSet":
    """Restrict the ladder to even / odd levels and renormalize each subset."""
    c = coeffs.amplitudes
    total = float(np.sum(c * c))
    if abs(total - 1.0) > 1e-9:
        raise InvalidParameterError("amplitudes must be normalized before splitting")
    even = c[0::2]
    odd = c[1::2]
    w_even = float(np.sum(even * even))
    w_odd = float(np.sum(odd * odd))
    if w_even <= 0.0 or w_odd <= 0.0 or odd.size == 0:
        raise DegenerateSplitError(
            f"cannot split: even weight {w_even:.3g}, odd weight {w_odd:.3g}"
        )
    return CoefficientSet(
        alpha=coeffs.alpha,
        n_max=coeffs.n_max,
        amplitudes=c,
        even_amplitudes=even / math.sqrt(w_even),
        odd_amplitudes=odd / math.sqrt(w_odd),
    )


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    """Coherent-ladder amplitudes and their normalized parity subsets."""

    alpha: float
    n_max: int
    amplitudes: np.ndarray
    even_amplitudes: np.ndarray | None = None
    odd_amplitudes: np.ndarray | None = None

    @property
    def is_split(self) -> bool:
        return self.even_amplitudes is not None and self.odd_amplitudes is not None


@dataclass(frozen=True, eq=False)
class StateGrid:
    """Complex wave-function samples on a uniform position grid.

    theta is the control phase (None for a bare parity packet), t the
    evolution time in atomic units. params/coeffs record provenance and may
    be None for synthetic states used in tests.
    """

    x: np.ndarray
    psi: np.ndarray
    theta: float | None
    t: float
    params: MorseParams | None = None
    coeffs: CoefficientSet | None = None
    parity: str | None = None

    def __post_init__(self) -> None:
        if self.x.ndim != 1 or self.x.size != self.psi.size:
            raise GridError("x and psi must be 1-d arrays of equal length")
        steps = np.diff(self.x)
        if self.x.size < 2 or not np.all(steps > 0):
            raise GridError("grid must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise GridError("grid must be uniformly spaced")

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def norm(self) -> float:
        """Quadrature norm integral of |psi|^2."""
        return float(np.trapezoid(self.density, self.x))


def phase_circle_coeffs(theta: float) -> tuple[float, float, float]:
    """Weights of the even, odd, and cross densities at control phase theta.

    Returns ((1-cos)/2, (1+cos)/2, sin/2); the first two always sum to 1.
    """
    return (
        0.5 * (1.0 - math.cos(theta)),
        0.5 * (1.0 + math.cos(theta)),
        0.5 * math.sin(theta),
    )


class WavePacketModel:
    """Eigenbasis expansion engine for the phase-locked packet family.

    Precomputes the eigenfunction table and level energies once; every state
    is then a single coefficient contraction, which keeps all operations pure
    and safe to call from many threads.
    """

    def __init__(self, params: MorseParams, coeffs: CoefficientSet, x_grid: np.ndarray):
        if not coeffs.is_split:
            coeffs = split_even_odd(coeffs)
        n_levels = coeffs.n_max + 1
        if n_levels > params.bound_state_count:
            raise InvalidParameterError(
                f"{n_levels} levels requested but only {params.bound_state_count} are bound"
            )
        self.params = params
        self.coeffs = coeffs
        self.x = np.asarray(x_grid, dtype=float)
        self.table = eigenfunction_table(params, n_levels, self.x)
        self.energies = energies(params, n_levels)
        even_vec = np.zeros(n_levels)
        even_vec[0::2] = coeffs.even_amplitudes
        odd_vec = np.zeros(n_levels)
        odd_vec[1::2] = coeffs.odd_amplitudes
        self._parity_vectors = {"even": even_vec, "odd": odd_vec}

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    def _expand(self, weights: np.ndarray, t: float) -> np.ndarray:
        # Fixed summation order over levels for bit-reproducibility.
        phased = weights * np.exp(-1j * self.energies * t)
        return phased @ self.table

    def subsidiary(self, parity: str, t: float) -> StateGrid:
        """Unit-norm packet restricted to one parity class of levels."""
        if parity not in self._parity_vectors:
            raise InvalidParameterError(f"parity must be 'even' or 'odd', got {parity!r}")
        psi = self._expand(self._parity_vectors[parity], t)
        return StateGrid(
            x=self.x, psi=psi, theta=None, t=t,
            params=self.params, coeffs=self.coeffs, parity=parity,
        )

    def phase_locked(self, theta: float, t: float) -> StateGrid:
        """Coherent mix of the parity packets at control phase theta.

        theta is reduced mod 2*pi; the analytic norm is exactly 1.
        """
        th = float(theta) % (2.0 * math.pi)
        a = 0.5 * (1.0 - np.exp(1j * th))
        b = 0.5 * (1.0 + np.exp(1j * th))
        weights = a * self._parity_vectors["even"] + b * self._parity_vectors["odd"]
        psi = self._expand(weights, t)
        return StateGrid(
            x=self.x, psi=psi, theta=th, t=t, params=self.params, coeffs=self.coeffs,
        )

    def density(self, theta: float, t: float) -> np.ndarray:
        """|state(theta, t)|^2 on the position grid."""
        return self.phase_locked(theta, t).density

    def density_decomposition(self, theta: float, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Even, odd and cross contributions whose pointwise sum is the density.

        The cross part is (sin(theta)/2) * i*(odd*conj(even) - even*conj(odd)),
        which is real-valued.
        """
        even = self.subsidiary("even", t).psi
        odd = self.subsidiary("odd", t).psi
        even_coeff, odd_coeff, cross_coeff = phase_circle_coeffs(theta)
        even_part = even_coeff * np.abs(even) ** 2
        odd_part = odd_coeff * np.abs(odd) ** 2
        cross_part = cross_coeff * np.real(1j * (odd * np.conj(even) - even * np.conj(odd)))
        return even_part, odd_part, cross_part
