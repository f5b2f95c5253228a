"""Independent reference implementations used by multiple test modules."""
import itertools

from roughnet.series import NormChoice, TimeSeries, increments


def brute_force_pvar(x, p, k=0, l=None, norm=NormChoice.L2):
    """Exhaustive maximum over all pinned increasing subsequences of k..l.

    Exponentially slow; the independent reference for the dynamic program.
    """
    if isinstance(x, TimeSeries):
        A = increments(x).norms(norm)
    else:
        A = x.norms(norm)
    if l is None:
        l = A.shape[0] - 1
    if l - k > 14:
        raise ValueError("brute force is limited to short intervals")
    if k == l:
        return 0.0
    best = 0.0
    interior = range(k + 1, l)
    for r in range(l - k):
        for mid in itertools.combinations(interior, r):
            seq = (k,) + mid + (l,)
            total = sum(A[a, b] ** p for a, b in zip(seq, seq[1:]))
            best = max(best, total)
    return best ** (1.0 / p)
