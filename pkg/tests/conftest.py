"""Shared test helpers."""

import numpy as np
from scipy.optimize import linear_sum_assignment


def match_dist(w1, w2):
    """Optimal-assignment distance between two eigenvalue multisets; immune
    to sort-order flips at floating-point ties."""
    w1 = np.asarray(w1, complex).ravel()
    w2 = np.asarray(w2, complex).ravel()
    assert w1.shape == w2.shape
    C = np.abs(w1[:, None] - w2[None, :])
    r, c = linear_sum_assignment(C)
    return float(C[r, c].max())
