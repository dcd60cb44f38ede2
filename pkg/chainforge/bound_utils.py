"""
@file: bound_utils.py
@time: 2026/10/17 16:02
@desc: analytic fidelity and timing bounds for ladder-spectrum chains
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc
from scipy.stats import binom

from chainforge.logger import logger

# p(t_in) = 1/3 at t_in = (2/π)·arcsin(1/√3)·t0
ENCODING_ONSET = 2.0 / math.pi * math.asin(1.0 / math.sqrt(3.0))
ENCODING_HEADLINE = 0.22


@dataclass(frozen=True)
class EncodingTimeBound(object):
    """Chernoff bound on the unencoded weight and the encoded-transfer duration

    Attributes:
        epsilon: upper bound on the weight outside the middle third
        t_in: time at which the wavepacket mean reaches a third of the chain
        duration: t0 - 2·t_in
        headline: 0.22·t0
    """
    epsilon: float
    t_in: float
    duration: float
    headline: float


class TransferBounds(object):
    """Closed-form bounds

    Attributes:
        None
    """

    def __init__(self):
        pass

    @staticmethod
    def fmin_bound(weights, violated):
        """1 - 2·Σ_{n∈Γ_P̄} w_n, unclamped

        :param weights: |a_n|² per eigenvector, summing to 1
        :param violated: indices of Γ_P̄, or an EigenvalueClassification
        """
        weights = np.asarray(weights, dtype=float)
        if abs(float(np.sum(weights)) - 1.0) > 1e-8:
            logger.warning('eigenvector weights sum to {0:.12g}, not 1'.format(float(np.sum(weights))))
        violated = getattr(violated, 'violated', violated)
        return 1.0 - 2.0 * float(np.sum(weights[np.asarray(violated, dtype=int)])) if len(violated) else 1.0

    @staticmethod
    def binomial_weights(size):
        """|<λ_n|1>|² of the perfect-transfer chain: binomial(N-1, 1/2)."""
        return binom.pmf(np.arange(size), size - 1, 0.5)

    @staticmethod
    def binomial_tail_error(size, kept=None):
        """Exact 1 - F_min for binomial weights with the central `kept` eigenvalues in Γ_P

        kept defaults to round(N/3); it is bumped by one when needed so that
        the violated tails are equal in size. The two tails are summed
        directly, never as 1 - F_min, so tiny errors keep their digits.
        """
        kept = int(round(size / 3.0)) if kept is None else int(kept)
        if (size - kept) % 2:
            kept += 1
        kept = min(kept, size)
        start = (size - kept) // 2
        if start == 0:
            return 0.0
        # 2·Σ over both tails of a symmetric binomial(N-1, 1/2)
        return 4.0 * float(binom.cdf(start - 1, size - 1, 0.5))

    @staticmethod
    def endtoend_error_bound(size):
        """(8/√(2π))∫_{-∞}^{-√N/6} e^{-2θ²}dθ = 2·erfc(√(2N)/6) and its majorant (12/√(2Nπ))e^{-N/18}."""
        if size < 2:
            raise ValueError('bounds need N >= 2')
        integral = 2.0 * float(erfc(math.sqrt(2.0 * size) / 6.0))
        closed = 12.0 / math.sqrt(2.0 * size * math.pi) * math.exp(-size / 18.0)
        return integral, closed

    @staticmethod
    def wavepacket_stats(size, t, t0):
        """Mean site, spread and site distribution of |1> evolving on the perfect-transfer chain

        :return: (mean, spread, binomial pmf over sites 1..N)
        """
        if t < 0:
            raise ValueError('time must be non-negative')
        p = math.sin(math.pi * t / (2.0 * t0)) ** 2
        mean = (size - 1) * p + 1.0
        spread = math.sqrt(size - 1) / 2.0 * abs(math.sin(math.pi * t / t0))
        return mean, spread, binom.pmf(np.arange(size), size - 1, p)

    @staticmethod
    def encoding_time_bound(size, p, t0=1.0):
        """ε ≤ exp(-(N-1)p(3p-1)²/(21-9p)) with the encoded-transfer window of a t0 transfer

        :return: EncodingTimeBound
        """
        if not 0.0 < p < 1.0:
            raise ValueError('p must lie in (0, 1)')
        epsilon = math.exp(-(size - 1) * p * (3.0 * p - 1.0) ** 2 / (21.0 - 9.0 * p))
        t_in = ENCODING_ONSET * t0
        return EncodingTimeBound(epsilon, t_in, t0 - 2.0 * t_in, ENCODING_HEADLINE * t0)

    @staticmethod
    def bounds_table(size, t=None, t0=1.0, p=0.5):
        """Every bound for one N, as the bounds command reports them."""
        integral, closed = TransferBounds.endtoend_error_bound(size)
        tail = TransferBounds.binomial_tail_error(size)
        fmin = 1.0 - tail
        if fmin < 0.0:
            logger.warning('F_min = {0:.6g} for N={1} is below zero, reporting 0'.format(fmin, size))
        mean, spread, _ = TransferBounds.wavepacket_stats(size, t0 / 2.0 if t is None else t, t0)
        timing = TransferBounds.encoding_time_bound(size, p, t0)
        return {'N': size, 'integral_bound': integral, 'closed_form_bound': closed,
                'binomial_tail_error': tail, 'fmin': max(fmin, 0.0),
                'wavepacket_mean': mean, 'wavepacket_spread': spread,
                'chernoff_epsilon': timing.epsilon, 't_in': timing.t_in,
                'encoded_duration': timing.duration, 'headline_duration': timing.headline}
