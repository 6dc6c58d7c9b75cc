"""Rejection-free kinetic Monte Carlo inner loop.

One algorithm, two execution modes: compiled with numba when available,
plain Python otherwise.  Both consume the supplied Philox stream in exactly
the same order, so trajectories are bit-identical across modes.

The loop maintains the set of currently unstable sites (flipping x can only
change the stability of x and its neighbors) and advances time by
Exp(1)/|unstable| per event, flipping a uniformly chosen member: the
embedded law of independent rate-1 flips at unstable sites.  Rings at
stable sites are no-ops and are never generated.
"""
from __future__ import annotations

import numpy as np

STATUS_FIXATED = 0
STATUS_HORIZON = 1
STATUS_CAP = 2
STATUS_TIE = 3
STATUS_BOUND = 4

_TOL = 5e-13  # on delta_H / 2


def _kmc_core(spins, neighbors, j_slot, bfield, h, horizon, tie_fatal,
              per_site_cap, ev_times, ev_sites, ev_spins, flip_counts, gen):
    n = spins.shape[0]
    f = np.empty(n)
    for x in range(n):
        acc = bfield[x] + h
        for k in range(3):
            y = neighbors[x, k]
            if y >= 0:
                acc += j_slot[x, k] * spins[y]
        f[x] = acc

    members = np.empty(n, np.int32)
    pos = np.full(n, -1, np.int32)
    m = 0
    for x in range(n):
        d = spins[x] * f[x]
        if d < -_TOL:
            members[m] = x
            pos[x] = m
            m += 1
        elif d <= _TOL and tie_fatal:
            return 0, 0.0, STATUS_TIE

    t = 0.0
    cap = ev_times.shape[0]
    n_ev = 0
    status = STATUS_FIXATED
    while m > 0:
        if n_ev >= cap:
            status = STATUS_CAP
            break
        u = gen.random()
        dt = -np.log(1.0 - u) / m
        if t + dt > horizon:
            t = horizon
            status = STATUS_HORIZON
            break
        t = t + dt
        i = int(gen.random() * m)
        if i >= m:
            i = m - 1
        x = members[i]
        s_new = -spins[x]
        spins[x] = s_new
        ev_times[n_ev] = t
        ev_sites[n_ev] = x
        ev_spins[n_ev] = s_new
        n_ev += 1
        flip_counts[x] += 1
        if flip_counts[x] > per_site_cap:
            status = STATUS_BOUND
            break
        # x's own delta_H changed sign: it is now stable
        m -= 1
        last = members[m]
        members[i] = last
        pos[last] = i
        pos[x] = -1
        bad = False
        for k in range(3):
            y = neighbors[x, k]
            if y < 0:
                continue
            f[y] += 2.0 * s_new * j_slot[x, k]
            d = spins[y] * f[y]
            p = pos[y]
            if d < -_TOL:
                if p < 0:
                    members[m] = y
                    pos[y] = m
                    m += 1
            else:
                if d <= _TOL and tie_fatal:
                    status = STATUS_TIE
                    bad = True
                    break
                if p >= 0:
                    m -= 1
                    last = members[m]
                    members[p] = last
                    pos[last] = p
                    pos[y] = -1
        if bad:
            break
    return n_ev, t, status


kmc_core_py = _kmc_core

try:  # pragma: no cover - exercised implicitly everywhere
    import numba

    kmc_core = numba.njit(cache=True)(_kmc_core)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    kmc_core = _kmc_core
    HAVE_NUMBA = False
