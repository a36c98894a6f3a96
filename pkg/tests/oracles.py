"""Brute-force reference computations, kept independent of the package code."""

import numpy as np


def _unit_rows(rng, n, d):
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sampled_feasible_max(alpha, center, radius, rng, n_points=10**6, batch=200_000):
    """Largest <alpha, theta> over ``n_points`` feasible samples of
    {||theta - center|| <= radius} intersected with the unit ball.

    A linear objective peaks on the boundary of a convex set, so candidates
    are drawn uniformly on the two bounding spheres and on the sphere where
    they meet; every candidate is checked against both constraints before
    it counts. Returns (max value, number of feasible points used).
    """
    alpha = np.asarray(alpha, float)
    c = np.asarray(center, float)
    d = len(c)
    c_norm = np.linalg.norm(c)
    meet = abs(1 - radius) <= c_norm <= 1 + radius and c_norm > 0
    best = -np.inf
    used = 0
    slack = 1e-12
    while used < n_points:
        pieces = [c + radius * _unit_rows(rng, batch, d), _unit_rows(rng, batch, d)]
        if meet:
            offset = (1 + c_norm**2 - radius**2) / (2 * c_norm)
            c_hat = c / c_norm
            w = rng.standard_normal((batch, d))
            w -= np.outer(w @ c_hat, c_hat)
            w /= np.linalg.norm(w, axis=1, keepdims=True)
            pieces.append(offset * c_hat + np.sqrt(max(1 - offset**2, 0.0)) * w)
        pts = np.vstack(pieces)
        ok = (np.linalg.norm(pts, axis=1) <= 1 + slack) & (np.linalg.norm(pts - c, axis=1) <= radius + slack)
        pts = pts[ok][: n_points - used]
        used += len(pts)
        if len(pts):
            best = max(best, float((pts @ alpha).max()))
    return best, used


def dense_ridge(rows, targets):
    """Ridge solution via least squares on the stacked system [A; I] theta = [G; 0]."""
    A = np.asarray(rows, float).reshape(len(targets), -1)
    d = A.shape[1]
    stacked = np.vstack([A, np.eye(d)])
    rhs = np.concatenate([np.asarray(targets, float), np.zeros(d)])
    return np.linalg.lstsq(stacked, rhs, rcond=None)[0]


def random_ball_triple(rng, d=4):
    """Random (center, radius, alpha) with the two balls intersecting."""
    while True:
        center = _unit_rows(rng, 1, d)[0] * rng.uniform(0.0, 1.6)
        radius = rng.uniform(0.05, 2.0)
        if np.linalg.norm(center) <= 1 + radius:
            break
    alpha = _unit_rows(rng, 1, d)[0] * rng.uniform(0.1, 1.0)
    return center, radius, alpha
