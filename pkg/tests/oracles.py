"""Independent oracle implementations the library results are checked against.

Nothing here shares code with the package's solution paths: the KKT solve
goes through a dense saddle-point system, the regression oracle through
numpy's polynomial fit, and the Lagrange weights through the direct product
formula.
"""

import numpy as np


def kkt_minimum_variance(x, t0, d, omega_hat):
    """Equality-constrained quadratic program solved via its dense KKT system.

    min a' omega_hat a  s.t.  sum_i a_i x_i^s = t0^s, s = 0..d-1.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if d == 0:
        return np.zeros(n)
    vand = np.vander(x, d, increasing=True).T  # d x n constraint rows
    kkt = np.zeros((n + d, n + d))
    kkt[:n, :n] = 2.0 * omega_hat
    kkt[:n, n:] = vand.T
    kkt[n:, :n] = vand
    rhs = np.concatenate([np.zeros(n), t0 ** np.arange(d)])
    return np.linalg.solve(kkt, rhs)[:n]


def lagrange_weights(nodes, t):
    """Direct product-formula interpolation weights at t."""
    nodes = np.asarray(nodes, dtype=float)
    w = np.ones(nodes.size)
    for i in range(nodes.size):
        for k in range(nodes.size):
            if k != i:
                w[i] *= (t - nodes[k]) / (nodes[i] - nodes[k])
    return w


def polyfit_eval(x, y, t0, degree):
    """Ordinary least-squares polynomial fit evaluated at t0."""
    return float(np.polyval(np.polyfit(x, y, degree), t0))
