"""Composite Gauss-Legendre quadrature helpers.

All integrands in this package are smooth on each panel, so fixed
composite Gauss rules reach machine precision; nothing here is
adaptive, which keeps every computation deterministic.
"""

import numpy as np

_NODE_CACHE = {}


def gauss_nodes(n):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    if n not in _NODE_CACHE:
        _NODE_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _NODE_CACHE[n]


def panel_nodes(a, b, panels, n=16):
    """Flattened nodes and weights of a uniform composite rule on [a, b]."""
    x, w = gauss_nodes(n)
    edges = np.linspace(a, b, panels + 1)
    return nodes_from_edges(edges, n=n)


def nodes_from_edges(edges, n=4):
    """Composite Gauss nodes for the panels defined by an edge array."""
    x, w = gauss_nodes(n)
    edges = np.asarray(edges, dtype=float)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return pts, wts


def integrate(f, a, b, panels=256, n=16):
    """Integral of a vectorized callable over [a, b]."""
    pts, wts = panel_nodes(a, b, panels, n=n)
    return float(np.dot(wts, f(pts)))
