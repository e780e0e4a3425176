"""Pure numpy implementations of the hot scoring kernels.

Mirrors the interface of the compiled module `pathgroups._kernels`; selection
happens in `pathgroups.kernels`. Both kernels work on flat dense tables
indexed by base-n_labels keys: the history digits are most significant, the
successor is the least significant digit.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

COMPILED = False


def accumulate_layer(hists, succs, counts, labels, n_labels, out):
    """Add relabeled entry counts into the flat dense table `out`.

    out[key] += count with key = (labels[h_0], ..., labels[h_{k-1}],
    labels[succ]) read as a base-n_labels number.
    """
    if succs.size == 0:
        return
    keys = np.zeros(succs.size, dtype=np.int64)
    for c in range(hists.shape[1]):
        keys *= n_labels
        keys += labels[hists[:, c]]
    keys *= n_labels
    keys += labels[succs]
    # float accumulation is exact: total mass stays far below 2**53
    acc = np.bincount(keys, weights=counts.astype(np.float64), minlength=out.size)
    out += np.rint(acc).astype(np.int64)


def layer_evidence(table, n_labels, hist_len, default_size, succ_sizes=None):
    """Dirichlet-multinomial log evidence of one layer from its dense table.

    Rows of table.reshape(-1, n_labels) are histories. The prior support size
    is `default_size` for every history unless `succ_sizes` is given, in which
    case history rows with hist_len >= 1 use succ_sizes[last history element].
    Histories with no observations contribute exactly zero.
    """
    tab = table.reshape(-1, n_labels)
    totals = tab.sum(axis=1)
    rows = np.flatnonzero(totals)
    if rows.size == 0:
        return 0.0
    sub = tab[rows]
    ent = float(gammaln(sub[sub > 0] + 1.0).sum())
    if succ_sizes is None or hist_len == 0:
        sizes = np.full(rows.size, float(default_size))
    else:
        sizes = succ_sizes[rows % n_labels].astype(np.float64)
    n = totals[rows].astype(np.float64)
    return ent + float((gammaln(sizes) - gammaln(sizes + n)).sum())
