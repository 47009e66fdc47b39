"""Compiled inner loops for centroid methods.

Random numbers are drawn by the caller from a numpy Generator and passed in
as uniforms, so results depend only on the caller's stream.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _sqdist(X, i, c):
    s = 0.0
    for a in range(X.shape[1]):
        t = X[i, a] - c[a]
        s += t * t
    return s


@njit(cache=True)
def seed_pp(X, k, u, h=0):
    """D^2-weighted seeding; returns the chosen row indices.

    ``u`` holds k uniforms in [0, 1). Rows at zero distance from a chosen
    centroid carry no mass; if all mass is zero, the next row is drawn
    uniformly among rows not chosen yet. With ``h > 0`` the ``h`` rows
    farthest from the current seeds also carry no mass, so seeding for a
    trimmed fit does not spend centroids on the points it will trim.
    """
    n = X.shape[0]
    chosen = np.empty(k, np.int64)
    taken = np.zeros(n, np.bool_)
    d2 = np.empty(n)
    first = min(int(u[0] * n), n - 1)
    chosen[0] = first
    taken[first] = True
    for i in range(n):
        d2[i] = _sqdist(X, i, X[first])
    w = np.empty(n)
    for j in range(1, k):
        w[:] = d2
        if h > 0:
            far = np.argsort(-d2, kind="mergesort")
            for t in range(min(h, n)):
                w[far[t]] = 0.0
        total = 0.0
        for i in range(n):
            total += w[i]
        pick = -1
        if total > 0.0:
            target = u[j] * total
            acc = 0.0
            for i in range(n):
                acc += w[i]
                if acc > target and w[i] > 0.0:
                    pick = i
                    break
            if pick < 0:
                # rounding put target at the very end of the mass
                for i in range(n - 1, -1, -1):
                    if w[i] > 0.0:
                        pick = i
                        break
        else:
            free = n - j
            r = min(int(u[j] * free), free - 1)
            for i in range(n):
                if not taken[i]:
                    if r == 0:
                        pick = i
                        break
                    r -= 1
        chosen[j] = pick
        taken[pick] = True
        for i in range(n):
            s = _sqdist(X, i, X[pick])
            if s < d2[i]:
                d2[i] = s
    return chosen


@njit(cache=True)
def concentrate(X, C, h, max_iter, trace):
    """Alternate nearest-centroid assignment, trimming and mean updates.

    ``C`` (k x d) is updated in place. ``h`` items with the largest distance
    to their centroid are trimmed at each step (``h = 0`` is plain Lloyd).
    ``trace[t]`` receives the objective after the t-th assignment step.
    Stops when labels and trimmed set repeat exactly or after ``max_iter``
    mean updates.

    Returns (labels, trimmed mask, objective, number of assignment steps).
    """
    n, d = X.shape
    k = C.shape[0]
    labels = np.full(n, -1, np.int64)
    prev = np.full(n, -1, np.int64)
    trimmed = np.zeros(n, np.bool_)
    prev_trim = np.zeros(n, np.bool_)
    dist = np.empty(n)
    counts = np.zeros(k)
    objective = 0.0
    steps = 0
    for it in range(max_iter + 1):
        for i in range(n):
            best = np.inf
            bj = 0
            for j in range(k):
                s = _sqdist(X, i, C[j])
                if s < best:
                    best = s
                    bj = j
            labels[i] = bj
            dist[i] = best
        trimmed[:] = False
        if h > 0:
            order = np.argsort(-dist, kind="mergesort")
            for t in range(h):
                trimmed[order[t]] = True
        objective = 0.0
        for i in range(n):
            if not trimmed[i]:
                objective += dist[i]
        trace[it] = objective
        steps = it + 1
        same = it > 0
        if same:
            for i in range(n):
                if labels[i] != prev[i] or trimmed[i] != prev_trim[i]:
                    same = False
                    break
        if same or it == max_iter:
            break
        prev[:] = labels
        prev_trim[:] = trimmed

        C[:, :] = 0.0
        counts[:] = 0.0
        for i in range(n):
            if not trimmed[i]:
                counts[labels[i]] += 1.0
                for a in range(d):
                    C[labels[i], a] += X[i, a]
        for j in range(k):
            if counts[j] > 0.0:
                for a in range(d):
                    C[j, a] /= counts[j]
        for j in range(k):
            if counts[j] == 0.0:
                # re-seed at the untrimmed point farthest from its centroid
                far = -1
                fd = -1.0
                for i in range(n):
                    if not trimmed[i] and dist[i] > fd:
                        fd = dist[i]
                        far = i
                for a in range(d):
                    C[j, a] = X[far, a]
                dist[far] = -1.0
    return labels, trimmed, objective, steps


@njit(cache=True)
def best_of_restarts(X, k, h, U, max_iter):
    """Seed + concentrate once per row of ``U``; keep the smallest objective.

    Ties go to the earliest restart. Returns (labels, trimmed, centroids,
    objective, per-restart objectives).
    """
    R = U.shape[0]
    trace = np.empty(max_iter + 1)
    best_obj = np.inf
    best_labels = np.zeros(X.shape[0], np.int64)
    best_trim = np.zeros(X.shape[0], np.bool_)
    best_C = np.zeros((k, X.shape[1]))
    objs = np.empty(R)
    for r in range(R):
        idx = seed_pp(X, k, U[r], h)
        C = np.empty((k, X.shape[1]))
        for j in range(k):
            C[j] = X[idx[j]]
        labels, trimmed, obj, _ = concentrate(X, C, h, max_iter, trace)
        objs[r] = obj
        if obj < best_obj:
            best_obj = obj
            best_labels = labels
            best_trim = trimmed
            best_C = C
    return best_labels, best_trim, best_C, best_obj, objs
