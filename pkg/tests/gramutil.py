"""Batched Gauss-Kronrod Gram matrices for the orthonormality suites.

Each basis family factors its pair integrand as table[n](t) * table[m](t)
over one or two finite segments (semi-infinite pieces arrive here already
transformed).  A fixed composite GK(7,15) mesh evaluates the whole family
once per segment, every pairwise integral falls out of one einsum, and the
per-pair |K15 - G7| discrepancy provides an a-posteriori error bound that
the tests assert before trusting the Gram entries.
"""

import numpy as np

from cutjump.specfun import _G7_WEIGHTS, _GK_NODES, _K15_WEIGHTS


def pairwise_gram(segments, n_max):
    """Return (gram, err_bound), both (n_max+1, n_max+1).

    ``segments`` is a list of (lo, hi, n_panels, table_fn) with
    table_fn(t: 1-D array) -> array (n_max+1, t.size) such that the pair
    (n, m) integrand on the segment is table[n] * table[m].
    """
    size = n_max + 1
    gram = np.zeros((size, size))
    err = np.zeros((size, size))
    for lo, hi, n_panels, table_fn in segments:
        edges = np.linspace(lo, hi, n_panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        nodes = mid[:, None] + half[:, None] * _GK_NODES[None, :]
        table = table_fn(nodes.ravel()).reshape(size, n_panels, 15)
        k15 = np.einsum("npk,mpk,k,p->nm", table, table, _K15_WEIGHTS, half, optimize=True)
        g7_panels = np.einsum("npk,mpk,k,p->nmp", table, table, _G7_WEIGHTS, half, optimize=True)
        k15_panels = np.einsum("npk,mpk,k,p->nmp", table, table, _K15_WEIGHTS, half, optimize=True)
        gram += k15
        err += np.abs(k15_panels - g7_panels).sum(axis=2)
    return gram, err
