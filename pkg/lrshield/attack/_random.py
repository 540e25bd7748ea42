#!/usr/bin/env python

#
# This file is part of the `lrshield` Python module
#
# Copyright 2025
# LRShield Team
#
# File author(s): LRShield Team (lrshield@users.noreply.github.com)
#
# Distributed under the GPLv3 license
# See the file `LICENSE` or read a copy at
# https://www.gnu.org/licenses/gpl-3.0.txt
#

"""
Random load redistribution attacks drawn from a zero-sum Gaussian.
"""

from __future__ import annotations

from typing import Any
from collections.abc import Sequence
import dataclasses

import numpy as np
import scipy.linalg

from .. import _log
from .._errors import AttackError
from ._scenario import AttackScenario, load_shift
from ..optim import constrained_psd

__all__ = [
    'RandomAttackSpec',
    'random_attack_spec',
    'random_lr_attack',
]


@dataclasses.dataclass(frozen = True)
class RandomAttackSpec:
    """
    Sampling distribution of the load changes of the attacked loads.

    The standard deviation of each change is half of the allowed change, so
    a single change stays within the bound with about 95% probability. The
    covariance makes the changes sum to zero.

    Attrs:
        attacked:
            Positions of the attacked loads.
        sigma_k:
            Standard deviation of each change (MW).
        gamma_cov:
            Covariance matrix of the changes.
        factor:
            Matrix ``L`` with ``L @ L.T`` equal to the covariance projected
            on the zero-sum subspace; draws are ``L @ z``.
    """

    attacked: tuple[int, ...]
    sigma_k: np.ndarray
    gamma_cov: np.ndarray
    factor: np.ndarray


    def draw(self, rng: np.random.Generator) -> np.ndarray:
        """
        One raw draw of the load changes.

        The last change is set to minus the sum of the others, which closes
        the zero-sum constraint to rounding precision.
        """

        gamma = self.factor @ rng.standard_normal(len(self.attacked))
        gamma[-1] = -gamma[:-1].sum()

        return gamma


def random_attack_spec(
        p: Sequence[float],
        attacked: Sequence[int],
        tau: float,
) -> RandomAttackSpec:
    """
    Build the sampling distribution for the loads in `attacked`.

    Raises:
        InfeasibleSpecError: If no zero-sum covariance with the required
            variances exists.
    """

    p = np.asarray(p, float)
    attacked = tuple(int(i) for i in attacked)
    sigma = 0.5 * tau * p[list(attacked)]
    cov = constrained_psd(sigma ** 2)
    k = len(attacked)
    center = np.eye(k) - 1.0 / k
    w, v = scipy.linalg.eigh(center @ cov @ center)
    factor = v * np.sqrt(np.clip(w, 0.0, None))

    return RandomAttackSpec(
        attacked = attacked,
        sigma_k = sigma,
        gamma_cov = cov,
        factor = factor,
    )


def random_lr_attack(
        p: Sequence[float],
        k: int,
        tau: float,
        rng: np.random.Generator,
        max_redraws: int = 100,
        hour: Any = None,
) -> AttackScenario:
    """
    Random load redistribution attack.

    Chooses `k` loads uniformly at random, builds their zero-sum covariance
    and draws load changes until the realized load shift is at most `tau`.

    Args:
        p:
            True loads (MW), in load order.
        k:
            Number of attacked loads, ``2 <= k <= len(p)``.
        tau:
            Load shift bound.
        rng:
            Random generator; it is advanced by the draws.
        max_redraws:
            Rejections tolerated after the first draw.
        hour:
            Hour label stored with the scenario.

    Raises:
        InfeasibleSpecError: If the chosen loads admit no zero-sum
            covariance; retry with another `k` or load set.
        AttackError: If every draw exceeded `tau`.
    """

    p = np.asarray(p, float)
    n_l = p.size

    if not 2 <= k <= n_l:

        raise ValueError(f'Attacked load count {k} outside [2, {n_l}].')

    if not tau > 0:

        raise ValueError(f'Load shift bound must be positive, got {tau}.')

    attacked = np.sort(rng.choice(n_l, size = k, replace = False))

    if np.any(p[attacked] <= 0):

        raise AttackError(
            'Random attack selected a load without demand.',
            reason = 'zero_load',
        )

    spec = random_attack_spec(p, attacked, tau)

    for redraw in range(max_redraws + 1):

        gamma = spec.draw(rng)
        delta_p = np.zeros(n_l)
        delta_p[attacked] = gamma
        tau_real = load_shift(p, delta_p)

        if tau_real <= tau:

            break

    else:

        _log(
            f'Random attack rejected after {max_redraws} redraws '
            f'(k={k}, tau={tau}).',
            level = 0,
        )

        raise AttackError(
            f'No draw within load shift {tau} after {max_redraws} redraws.',
            reason = 'redraws',
        )

    return AttackScenario(
        hour = hour,
        kind = 'random',
        p = p,
        delta_p = delta_p,
        tau_requested = float(tau),
        tau_real = tau_real,
        attacked = tuple(int(i) for i in attacked),
        redraws = redraw,
    )
