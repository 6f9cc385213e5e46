"""Numeric hot paths with a numba lane and a pure-numpy fallback lane.

The jitted lane is used whenever numba imports cleanly; setting the
environment variable ``NEGOTEAM_NO_NUMBA=1`` before import forces the numpy
lane (useful on platforms where the JIT misbehaves, and for benchmarking).
Both lanes implement the same contracts and agree to within floating-point
round-off; results are bit-reproducible within a lane.
"""
from __future__ import annotations

import logging
import os

import numpy as np

logger = logging.getLogger(__name__)

try:  # pragma: no cover - exercised implicitly by lane selection
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

_FORCE_NUMPY = os.environ.get("NEGOTEAM_NO_NUMBA", "").strip() not in ("", "0")
USE_NUMBA = HAS_NUMBA and not _FORCE_NUMPY


def _project_iso_np(cands, grad, offset, target, tol, max_iter):
    """Project candidate points onto the iso-utility hyperplane, clipped to the box.

    utility(x) = offset + grad . x. Each candidate is stepped along ``grad``
    onto the plane utility == target, clipped to [0, 1]^n, and re-projected
    until on target or the iteration budget runs out.

    Returns (points, utilities, valid) where ``valid`` flags candidates whose
    final utility is within ``tol`` of ``target``.
    """
    out = cands.copy()
    gg = float(grad @ grad)
    utils_prev = None
    for _ in range(max_iter):
        utils = offset + out @ grad
        miss = target - utils
        active = np.abs(miss) > tol
        # also stop when every active candidate is stuck on a box face
        if not active.any() or (utils_prev is not None and np.array_equal(utils, utils_prev)):
            break
        utils_prev = utils
        out += np.outer(np.where(active, miss, 0.0) / gg, grad)
        np.clip(out, 0.0, 1.0, out=out)
    utils = offset + out @ grad
    valid = np.abs(utils - target) <= tol
    return out, utils, valid


def _ref_distance_sums_np(points, refs):
    """Sum of Euclidean distances from each point to every reference offer."""
    diff = points[:, None, :] - refs[None, :, :]
    return np.sqrt(np.einsum("prk,prk->pr", diff, diff)).sum(axis=1)


def _choose_iso_np(cands, grad, offset, target, tol, max_iter, refs):
    """Project candidates onto the target iso-surface and pick the winner.

    With references: the valid candidate with the smallest summed distance
    to them. Without (``refs`` has zero rows): the valid candidate with the
    highest utility. Ties go to the lowest candidate index.

    Returns (point, utility, found); ``found`` is False when no candidate
    lands within ``tol`` of the target.
    """
    points, utils, valid = _project_iso_np(cands, grad, offset, target, tol, max_iter)
    idx = np.flatnonzero(valid)
    if idx.size == 0:
        return np.zeros(cands.shape[1]), 0.0, False
    if refs.shape[0] == 0:
        best = idx[np.argmax(utils[idx])]
    else:
        best = idx[np.argmin(_ref_distance_sums_np(points[idx], refs))]
    return points[best].copy(), float(utils[best]), True




if HAS_NUMBA:

    @njit(cache=True)
    def _project_iso_nb(cands, grad, offset, target, tol, max_iter):  # pragma: no cover - jitted
        m, n = cands.shape
        gg = 0.0
        for k in range(n):
            gg += grad[k] * grad[k]
        out = cands.copy()
        utils = np.empty(m)
        valid = np.empty(m, np.bool_)
        for i in range(m):
            u_prev = np.inf
            for _ in range(max_iter):
                u = offset
                for k in range(n):
                    u += grad[k] * out[i, k]
                # stuck on a box face: the step is a fixed point, stop early
                if abs(target - u) <= tol or u == u_prev:
                    break
                u_prev = u
                lam = (target - u) / gg
                for k in range(n):
                    v = out[i, k] + lam * grad[k]
                    out[i, k] = 0.0 if v < 0.0 else (1.0 if v > 1.0 else v)
            u = offset
            for k in range(n):
                u += grad[k] * out[i, k]
            utils[i] = u
            valid[i] = abs(u - target) <= tol
        return out, utils, valid

    @njit(cache=True)
    def _ref_distance_sums_nb(points, refs):  # pragma: no cover - jitted
        m, n = points.shape
        r = refs.shape[0]
        sums = np.zeros(m)
        for i in range(m):
            for j in range(r):
                acc = 0.0
                for k in range(n):
                    d = points[i, k] - refs[j, k]
                    acc += d * d
                sums[i] += np.sqrt(acc)
        return sums

    @njit(cache=True, fastmath=True)
    def _choose_iso_nb(cands, grad, offset, target, tol, max_iter, refs):  # pragma: no cover - jitted
        m, n = cands.shape
        r = refs.shape[0]
        gg = 0.0
        for k in range(n):
            gg += grad[k] * grad[k]
        buf = np.empty(n)
        point = np.zeros(n)
        best_key = np.inf
        best_u = 0.0
        found = False
        for i in range(m):
            for k in range(n):
                buf[k] = cands[i, k]
            u_prev = np.inf
            u = offset
            for k in range(n):
                u += grad[k] * buf[k]
            for _ in range(max_iter):
                if abs(target - u) <= tol or u == u_prev:
                    break
                u_prev = u
                lam = (target - u) / gg
                for k in range(n):
                    v = buf[k] + lam * grad[k]
                    buf[k] = 0.0 if v < 0.0 else (1.0 if v > 1.0 else v)
                u = offset
                for k in range(n):
                    u += grad[k] * buf[k]
            if abs(u - target) > tol:
                continue
            if r == 0:
                key = -u
            else:
                key = 0.0
                for j in range(r):
                    acc = 0.0
                    for k in range(n):
                        d = buf[k] - refs[j, k]
                        acc += d * d
                    key += np.sqrt(acc)
            # strict comparison keeps the lowest index on ties
            if key < best_key:
                best_key = key
                best_u = u
                found = True
                for k in range(n):
                    point[k] = buf[k]
        return point, best_u, found


if USE_NUMBA:
    project_iso = _project_iso_nb
    ref_distance_sums = _ref_distance_sums_nb
    choose_iso = _choose_iso_nb
    ACTIVE_LANE = "numba"
else:
    project_iso = _project_iso_np
    ref_distance_sums = _ref_distance_sums_np
    choose_iso = _choose_iso_np
    ACTIVE_LANE = "numpy"

logger.debug("kernel lane: %s", ACTIVE_LANE)


def warm_up() -> None:
    """Trigger JIT compilation (a no-op on the numpy lane)."""
    cands = np.array([[0.2, 0.8, 0.5, 0.1]])
    grad = np.array([0.4, -0.3, 0.2, -0.1])
    project_iso(cands, grad, 0.4, 0.5, 1e-6, 10)
    ref_distance_sums(cands, cands)
    choose_iso(cands, grad, 0.4, 0.5, 1e-6, 10, cands)
