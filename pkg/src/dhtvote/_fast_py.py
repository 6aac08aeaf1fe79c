"""Pure-Python kernel implementations.

Interface twin of the compiled module _fast; selected by kernels.py when the
extension is unavailable or explicitly disabled.  Inputs are numpy arrays for
interface parity, but all arithmetic is plain Python ints.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def positions_from_sorted(addrs: np.ndarray, d: int) -> np.ndarray:
    """Tree positions of peers with sorted ring addresses.

    Peer i owns (addrs[i-1], addrs[i]] with wraparound; the wrapping segment
    (and the n == 1 full ring) takes the root position 0.
    """
    n = len(addrs)
    out = np.zeros(n, dtype=np.uint64)
    a = [int(x) for x in addrs]
    for i in range(n):
        lo = a[i - 1]
        hi = a[i]
        if lo >= hi:
            continue
        t = (lo ^ hi).bit_length() - 1
        out[i] = hi & ~((1 << t) - 1)
    return out


def _owns(a: list, n: int, i: int, dest: int) -> bool:
    lo = a[i - 1]
    hi = a[i]
    if lo == hi:
        return True
    if lo < hi:
        return lo < dest <= hi
    return dest > lo or dest <= hi


def route_hops_many(
    addrs: np.ndarray,
    fingers: np.ndarray,
    srcs: np.ndarray,
    dests: np.ndarray,
    d: int,
    symmetric: bool,
) -> np.ndarray:
    """Greedy overlay hop counts for a batch of (source peer, dest address).

    fingers[i] holds owner indices of peer i's finger targets.  Chord picks
    the finger farthest clockwise without passing dest; symmetric mode first
    hops to a finger owning dest, else the finger minimizing ring distance.
    Returns -1 for a probe exceeding the safety hop cap (never on a
    consistent overlay).
    """
    n = len(addrs)
    msk = (1 << d) - 1
    a = [int(x) for x in addrs]
    fng = fingers.tolist()
    out = np.empty(len(srcs), dtype=np.int64)
    cap = 4 * n + 64
    for p in range(len(srcs)):
        cur = int(srcs[p])
        dest = int(dests[p])
        hops = 0
        while not _owns(a, n, cur, dest):
            if hops > cap:
                hops = -1
                break
            row = fng[cur]
            nxt = -1
            if symmetric:
                best = min((a[cur] - dest) & msk, (dest - a[cur]) & msk)
                for f in row:
                    if f == cur:
                        continue
                    if _owns(a, n, f, dest):
                        nxt = f
                        break
                    rd = min((a[f] - dest) & msk, (dest - a[f]) & msk)
                    if rd < best:
                        best = rd
                        nxt = f
            else:
                span = (dest - a[cur]) & msk
                best = 0
                for f in row:
                    if f == cur:
                        continue
                    if _owns(a, n, f, dest):
                        nxt = f
                        break
                    fwd = (a[f] - a[cur]) & msk
                    if 0 < fwd <= span and fwd > best:
                        best = fwd
                        nxt = f
            if nxt < 0:
                nxt = (cur + 1) % n
            cur = nxt
            hops += 1
        out[p] = hops
    return out
