"""Hot numeric kernels, each with a numba and a pure-numpy implementation.

The numba versions run one path per inner loop; the numpy fallbacks
vectorize across a batch of paths and loop over time steps instead.  Per
path both orderings apply the identical sequence of IEEE-754 operations,
so the reflection and block-sum kernels agree bit for bit between
backends.  Transcendental-heavy kernels (the stable deviate transform,
the Bessel norms) can differ by a few ulp because numpy routes sin/cos
through SIMD loops while numba calls libm.

Backend selection: set ``REFLECTSIM_BACKEND=numpy`` or ``numba`` in the
environment (default: numba when importable, numpy otherwise).  Both
backends stay importable so they can be benchmarked side by side, see
``benchmarks/bench_backends.py``.
"""

from __future__ import annotations

import math
import os
from types import SimpleNamespace

import numpy as np

from .errors import ParameterError

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

ENV_VAR = "REFLECTSIM_BACKEND"


# ---------------------------------------------------------------------------
# Two-sided reflection of a random-walk skeleton.
#
# Recursion: y_i = clip(y_{i-1} + xi_i, 0, 1), with every downward clip
# recorded in the lower regulator and every upward clip in the upper one.
# Landing exactly on a barrier without overshoot is not a push.  Alongside
# the terminals the kernels track the last push step per barrier, the
# count of barrier alternations (first push included) and whether the path
# ever jumped floor-to-ceiling without revisiting the ceiling before its
# next floor hit (the "clean switching" flag, evaluated on exact 0/1
# values produced by clipping).
# ---------------------------------------------------------------------------


def _reflect_batch_np(x0, xi, compensated=False):
    r, n = xi.shape
    y = np.full(r, float(x0))
    lower = np.zeros(r)
    upper = np.zeros(r)
    lower_c = np.zeros(r)
    upper_c = np.zeros(r)
    last_lower = np.zeros(r, np.int64)
    last_upper = np.zeros(r, np.int64)
    switches = np.zeros(r, np.int64)
    last_side = np.zeros(r, np.int8)
    pending = np.zeros(r, bool)
    violated = np.zeros(r, bool)
    for i in range(n):
        prev_zero = y == 0.0
        v = y + xi[:, i]
        lo = v < 0.0
        hi = v > 1.0
        dl = np.where(lo, -v, 0.0)
        du = np.where(hi, v - 1.0, 0.0)
        if compensated:
            t = lower + dl
            lower_c += np.where(
                np.abs(lower) >= np.abs(dl), (lower - t) + dl, (dl - t) + lower
            )
            lower = t
            t = upper + du
            upper_c += np.where(
                np.abs(upper) >= np.abs(du), (upper - t) + du, (du - t) + upper
            )
            upper = t
        else:
            lower = lower + dl
            upper = upper + du
        y = np.where(lo, 0.0, np.where(hi, 1.0, v))
        step = i + 1
        last_lower = np.where(lo, step, last_lower)
        last_upper = np.where(hi, step, last_upper)
        switches += (lo & (last_side != 1)) | (hi & (last_side != 2))
        last_side = np.where(lo, 1, np.where(hi, 2, last_side)).astype(np.int8)
        viol_now = pending & (y == 0.0)
        violated |= viol_now
        pending &= ~viol_now & ~(y == 1.0)
        if step <= n - 1:
            pending |= prev_zero & (y == 1.0)
    violated |= pending
    return y, lower + lower_c, upper + upper_c, last_lower, last_upper, switches, ~violated


def _reflect_full_py(x0, xi, compensated=False):
    """Single-path recursion retaining positions and both regulator paths."""
    n = xi.shape[0]
    y = np.empty(n + 1)
    lower = np.empty(n + 1)
    upper = np.empty(n + 1)
    y[0] = x0
    lower[0] = 0.0
    upper[0] = 0.0
    acc_l = 0.0
    acc_u = 0.0
    cl = 0.0
    cu = 0.0
    for i in range(n):
        v = y[i] + xi[i]
        if v < 0.0:
            if compensated:
                t = acc_l + (-v)
                if abs(acc_l) >= abs(v):
                    cl += (acc_l - t) + (-v)
                else:
                    cl += ((-v) - t) + acc_l
                acc_l = t
            else:
                acc_l = acc_l + (-v)
            y[i + 1] = 0.0
        elif v > 1.0:
            d = v - 1.0
            if compensated:
                t = acc_u + d
                if abs(acc_u) >= abs(d):
                    cu += (acc_u - t) + d
                else:
                    cu += (d - t) + acc_u
                acc_u = t
            else:
                acc_u = acc_u + d
            y[i + 1] = 1.0
        else:
            y[i + 1] = v
        lower[i + 1] = acc_l + cl
        upper[i + 1] = acc_u + cu
    return y, lower, upper


def _block_sums_np(xi, m):
    r, nf = xi.shape
    n = nf // m
    blocks = xi.reshape(r, n, m)
    acc = blocks[:, :, 0].copy()
    for k in range(1, m):
        acc += blocks[:, :, k]
    return acc


# ---------------------------------------------------------------------------
# Stable deviate transform (uniform, exponential) -> strictly alpha-stable
# with skewness beta, unit scale, under the characteristic exponent
# -|t|^alpha * (1 - i*beta*tan(pi*alpha/2)*sgn t).  alpha = 1 requires
# beta = 0 and reduces to the Cauchy quantile transform.
# ---------------------------------------------------------------------------


def _cms_constants(alpha, beta):
    tb = beta * math.tan(math.pi * alpha / 2.0)
    b0 = math.atan(tb) / alpha
    s0 = (1.0 + tb * tb) ** (1.0 / (2.0 * alpha))
    return b0, s0, 1.0 / alpha, (1.0 - alpha) / alpha


def _cms_np(u, w, alpha, beta):
    # One exp + three logs instead of two pows: x = s0 * sin(att)
    # * exp(exp2*(log cos(theta-att) - log w) - inv_a*log cos(theta)).
    theta = np.pi * (u - 0.5)
    if alpha == 1.0:
        return np.tan(theta)
    b0, s0, inv_a, exp2 = _cms_constants(alpha, beta)
    att = alpha * (theta + b0)
    return (
        s0
        * np.sin(att)
        * np.exp(
            exp2 * (np.log(np.cos(theta - att)) - np.log(w))
            - inv_a * np.log(np.cos(theta))
        )
    )


def _nested_gap_np(xi, m):
    cs = np.cumsum(xi, axis=1)
    fine = np.maximum(cs.max(axis=1), 0.0)
    coarse = np.maximum(cs[:, m - 1 :: m].max(axis=1), 0.0)
    return fine - coarse


def _bessel_min_np(ups, z1, z2):
    def copy_min(z, t0):
        steps = z.copy()
        steps[:, 0, :] *= np.sqrt(t0)[:, None]
        pos = np.cumsum(steps, axis=1)
        norms = np.sqrt((pos * pos).sum(axis=2))
        return norms.min(axis=1)

    return np.minimum(copy_min(z1, ups), copy_min(z2, 1.0 - ups))


_NUMPY = SimpleNamespace(
    name="numpy",
    reflect_batch=_reflect_batch_np,
    reflect_full=_reflect_full_py,
    block_sums=_block_sums_np,
    cms=_cms_np,
    nested_gap=_nested_gap_np,
    bessel_min=_bessel_min_np,
)


if HAVE_NUMBA:

    @njit(cache=True)
    def _reflect_batch_nb(x0, xi, compensated=False):  # pragma: no cover - jit
        r, n = xi.shape
        terminal = np.empty(r)
        lower_out = np.empty(r)
        upper_out = np.empty(r)
        last_lower = np.zeros(r, np.int64)
        last_upper = np.zeros(r, np.int64)
        switches = np.zeros(r, np.int64)
        clean = np.empty(r, np.bool_)
        for j in range(r):
            y = x0
            lower = 0.0
            upper = 0.0
            cl = 0.0
            cu = 0.0
            ll = 0
            lu = 0
            sw = 0
            side = 0
            pending = False
            violated = False
            prev = y
            for i in range(n):
                v = y + xi[j, i]
                if v < 0.0:
                    d = -v
                    if compensated:
                        t = lower + d
                        if abs(lower) >= abs(d):
                            cl += (lower - t) + d
                        else:
                            cl += (d - t) + lower
                        lower = t
                    else:
                        lower = lower + d
                    y = 0.0
                    ll = i + 1
                    if side != 1:
                        sw += 1
                        side = 1
                elif v > 1.0:
                    d = v - 1.0
                    if compensated:
                        t = upper + d
                        if abs(upper) >= abs(d):
                            cu += (upper - t) + d
                        else:
                            cu += (d - t) + upper
                        upper = t
                    else:
                        upper = upper + d
                    y = 1.0
                    lu = i + 1
                    if side != 2:
                        sw += 1
                        side = 2
                else:
                    y = v
                if pending:
                    if y == 0.0:
                        violated = True
                        pending = False
                    elif y == 1.0:
                        pending = False
                if (not pending) and i + 1 <= n - 1 and prev == 0.0 and y == 1.0:
                    pending = True
                prev = y
            if pending:
                violated = True
            terminal[j] = y
            lower_out[j] = lower + cl
            upper_out[j] = upper + cu
            last_lower[j] = ll
            last_upper[j] = lu
            switches[j] = sw
            clean[j] = not violated
        return terminal, lower_out, upper_out, last_lower, last_upper, switches, clean

    @njit(cache=True)
    def _reflect_full_nb(x0, xi, compensated=False):  # pragma: no cover - jit
        n = xi.shape[0]
        y = np.empty(n + 1)
        lower = np.empty(n + 1)
        upper = np.empty(n + 1)
        y[0] = x0
        lower[0] = 0.0
        upper[0] = 0.0
        acc_l = 0.0
        acc_u = 0.0
        cl = 0.0
        cu = 0.0
        for i in range(n):
            v = y[i] + xi[i]
            if v < 0.0:
                d = -v
                if compensated:
                    t = acc_l + d
                    if abs(acc_l) >= abs(d):
                        cl += (acc_l - t) + d
                    else:
                        cl += (d - t) + acc_l
                    acc_l = t
                else:
                    acc_l = acc_l + d
                y[i + 1] = 0.0
            elif v > 1.0:
                d = v - 1.0
                if compensated:
                    t = acc_u + d
                    if abs(acc_u) >= abs(d):
                        cu += (acc_u - t) + d
                    else:
                        cu += (d - t) + acc_u
                    acc_u = t
                else:
                    acc_u = acc_u + d
                y[i + 1] = 1.0
            else:
                y[i + 1] = v
            lower[i + 1] = acc_l + cl
            upper[i + 1] = acc_u + cu
        return y, lower, upper

    @njit(cache=True)
    def _block_sums_nb(xi, m):  # pragma: no cover - jit
        r, nf = xi.shape
        n = nf // m
        out = np.empty((r, n))
        for j in range(r):
            for i in range(n):
                s = xi[j, i * m]
                for k in range(1, m):
                    s += xi[j, i * m + k]
                out[j, i] = s
        return out

    @njit(cache=True)
    def _cms_nb(u, w, alpha, beta):  # pragma: no cover - jit
        n = u.shape[0]
        out = np.empty(n)
        if alpha == 1.0:
            for i in range(n):
                out[i] = math.tan(np.pi * (u[i] - 0.5))
            return out
        tb = beta * math.tan(math.pi * alpha / 2.0)
        b0 = math.atan(tb) / alpha
        s0 = (1.0 + tb * tb) ** (1.0 / (2.0 * alpha))
        inv_a = 1.0 / alpha
        exp2 = (1.0 - alpha) / alpha
        for i in range(n):
            theta = np.pi * (u[i] - 0.5)
            att = alpha * (theta + b0)
            out[i] = (
                s0
                * math.sin(att)
                * math.exp(
                    exp2 * (math.log(math.cos(theta - att)) - math.log(w[i]))
                    - inv_a * math.log(math.cos(theta))
                )
            )
        return out

    @njit(cache=True)
    def _nested_gap_nb(xi, m):  # pragma: no cover - jit
        r, mn = xi.shape
        out = np.empty(r)
        for j in range(r):
            s = 0.0
            fine = 0.0
            coarse = 0.0
            for i in range(mn):
                s += xi[j, i]
                if s > fine:
                    fine = s
                if (i + 1) % m == 0 and s > coarse:
                    coarse = s
            out[j] = fine - coarse
        return out

    @njit(cache=True)
    def _bessel_min_nb(ups, z1, z2):  # pragma: no cover - jit
        r, locations, _ = z1.shape
        out = np.empty(r)
        for j in range(r):
            best = np.inf
            sd = math.sqrt(ups[j])
            x = sd * z1[j, 0, 0]
            y = sd * z1[j, 0, 1]
            z = sd * z1[j, 0, 2]
            nrm = math.sqrt(x * x + y * y + z * z)
            if nrm < best:
                best = nrm
            for k in range(1, locations):
                x += z1[j, k, 0]
                y += z1[j, k, 1]
                z += z1[j, k, 2]
                nrm = math.sqrt(x * x + y * y + z * z)
                if nrm < best:
                    best = nrm
            sd = math.sqrt(1.0 - ups[j])
            x = sd * z2[j, 0, 0]
            y = sd * z2[j, 0, 1]
            z = sd * z2[j, 0, 2]
            nrm = math.sqrt(x * x + y * y + z * z)
            if nrm < best:
                best = nrm
            for k in range(1, locations):
                x += z2[j, k, 0]
                y += z2[j, k, 1]
                z += z2[j, k, 2]
                nrm = math.sqrt(x * x + y * y + z * z)
                if nrm < best:
                    best = nrm
            out[j] = best
        return out

    _NUMBA = SimpleNamespace(
        name="numba",
        reflect_batch=_reflect_batch_nb,
        reflect_full=_reflect_full_nb,
        block_sums=_block_sums_nb,
        cms=_cms_nb,
        nested_gap=_nested_gap_nb,
        bessel_min=_bessel_min_nb,
    )
else:  # pragma: no cover
    _NUMBA = None

_BACKENDS = {"numpy": _NUMPY}
if _NUMBA is not None:
    _BACKENDS["numba"] = _NUMBA


def available_backends():
    return tuple(sorted(_BACKENDS))


def get_backend(name=None):
    """Resolve a kernel backend by name, env var, or default preference."""
    if name is None:
        name = os.environ.get(ENV_VAR, "").strip().lower() or None
    if name is None:
        name = "numba" if "numba" in _BACKENDS else "numpy"
    if name not in _BACKENDS:
        raise ParameterError(
            f"unknown kernel backend {name!r}; available: {available_backends()}"
        )
    return _BACKENDS[name]
