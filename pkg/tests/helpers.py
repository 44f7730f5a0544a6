"""Shared test utilities: sign alignment and synthetic data."""

import numpy as np

from kpcovr import (
    fit_feature_scaler,
    fit_target_scaler,
    transform_features,
    transform_targets,
)


def sign_align(reference, other):
    """Flip columns of ``other`` so each correlates positively with
    the matching column of ``reference``. Latent coordinates are only
    defined up to a per-column sign."""
    reference = np.asarray(reference, dtype=float)
    other = np.asarray(other, dtype=float)
    signs = np.sign(np.sum(reference * other, axis=0))
    signs[signs == 0] = 1.0
    return other * signs


def max_diff_up_to_sign(a, b):
    return float(np.max(np.abs(np.asarray(a) - sign_align(a, b))))


def linear_data(seed, n=20, f=4, p=2, noise=0.05):
    """Random features with a linear target map plus Gaussian noise."""
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, f))
    w = rng.normal(size=(f, p))
    y = x @ w + noise * rng.normal(size=(n, p))
    return x, y


def scaled_data(seed, n=20, f=4, p=2, noise=0.05):
    """linear_data pushed through the standard scalers."""
    x, y = linear_data(seed, n, f, p, noise)
    xs = transform_features(fit_feature_scaler(x), x)
    ys = transform_targets(fit_target_scaler(y), y)
    return xs, ys
