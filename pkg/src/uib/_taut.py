"""Funnel (shortest-path-through-gates) kernel for the taut string.

Compiled with numba; the solver is called a few hundred thousand times per
bandwidth sweep.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def taut_string_pinned(s, lo, hi):
    """Taut string through vertical gates ``[lo[j], hi[j]]`` at knots ``s[j]``.

    Both end gates must be degenerate (``lo == hi``). Returns the string
    values at every knot. The string is the shortest path through the gates
    and, for fixed ends, minimizes every convex functional of its slopes,
    in particular the energy ``sum (dx)**2 / ds``.
    """
    m = s.size
    # upper chain: lower convex hull of ceilings; lower chain: upper concave hull of floors
    ui = np.empty(m, np.int64)
    uy = np.empty(m)
    li = np.empty(m, np.int64)
    ly = np.empty(m)
    ci = np.empty(m, np.int64)
    cy = np.empty(m)
    uh = 0
    ut = 0
    lh = 0
    lt = 0
    nc = 0
    ui[0] = 0
    uy[0] = lo[0]
    li[0] = 0
    ly[0] = lo[0]
    ci[0] = 0
    cy[0] = lo[0]
    nc = 1
    for j in range(1, m):
        # ceiling point
        c = hi[j]
        while ut - uh >= 1:
            s1 = (uy[ut] - uy[ut - 1]) / (s[ui[ut]] - s[ui[ut - 1]])
            s2 = (c - uy[ut]) / (s[j] - s[ui[ut]])
            if s1 >= s2:
                ut -= 1
            else:
                break
        if ut == uh:
            while lt - lh >= 1:
                s1 = (ly[lh + 1] - ly[lh]) / (s[li[lh + 1]] - s[li[lh]])
                s2 = (c - ly[lh]) / (s[j] - s[li[lh]])
                if s1 >= s2:
                    lh += 1
                    ci[nc] = li[lh]
                    cy[nc] = ly[lh]
                    nc += 1
                else:
                    break
            uh = 0
            ut = 0
            ui[0] = li[lh]
            uy[0] = ly[lh]
        ut += 1
        ui[ut] = j
        uy[ut] = c

        # floor point
        f = lo[j]
        while lt - lh >= 1:
            s1 = (ly[lt] - ly[lt - 1]) / (s[li[lt]] - s[li[lt - 1]])
            s2 = (f - ly[lt]) / (s[j] - s[li[lt]])
            if s1 <= s2:
                lt -= 1
            else:
                break
        if lt == lh:
            # never advance onto j itself: a degenerate gate (f == c) would give a zero-length segment
            while ut - uh >= 1 and ui[uh + 1] != j:
                s1 = (uy[uh + 1] - uy[uh]) / (s[ui[uh + 1]] - s[ui[uh]])
                s2 = (f - uy[uh]) / (s[j] - s[ui[uh]])
                if s1 <= s2:
                    uh += 1
                    ci[nc] = ui[uh]
                    cy[nc] = uy[uh]
                    nc += 1
                else:
                    break
            lh = 0
            lt = 0
            li[0] = ui[uh]
            ly[0] = uy[uh]
        lt += 1
        li[lt] = j
        ly[lt] = f

    # the end gate is degenerate, so the upper chain is the final stretch
    for k in range(uh + 1, ut + 1):
        if ui[k] > ci[nc - 1]:
            ci[nc] = ui[k]
            cy[nc] = uy[k]
            nc += 1

    x = np.empty(m)
    for k in range(nc - 1):
        a = ci[k]
        b = ci[k + 1]
        x[a] = cy[k]
        for q in range(a + 1, b):
            x[q] = cy[k] + (cy[k + 1] - cy[k]) * (s[q] - s[a]) / (s[b] - s[a])
    x[ci[nc - 1]] = cy[nc - 1]
    return x


@njit(cache=True, nogil=True)
def taut_string_free_end(s, lo, hi):
    """Pinned at ``x[0] = lo[0] = hi[0]``, free right end.

    Mirrors the tube about the last knot and pins both ends; the symmetric
    problem has a symmetric unique minimizer whose left half solves the
    free-end problem.
    """
    m = s.size
    full = 2 * m - 1
    fs = np.empty(full)
    flo = np.empty(full)
    fhi = np.empty(full)
    last = s[m - 1]
    for j in range(m):
        fs[j] = s[j]
        flo[j] = lo[j]
        fhi[j] = hi[j]
        fs[full - 1 - j] = 2.0 * last - s[j]
        flo[full - 1 - j] = lo[j]
        fhi[full - 1 - j] = hi[j]
    x = taut_string_pinned(fs, flo, fhi)
    return x[:m].copy()


@njit(cache=True, nogil=True)
def path_energy(s, x):
    e = 0.0
    for j in range(1, s.size):
        d = x[j] - x[j - 1]
        e += d * d / (s[j] - s[j - 1])
    return e


@njit(cache=True, nogil=True)
def tube_energy(s, lo, hi):
    return path_energy(s, taut_string_free_end(s, lo, hi))
