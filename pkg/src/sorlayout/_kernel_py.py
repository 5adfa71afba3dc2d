"""Pure-Python solver kernel.

Fallback used when the compiled extension is unavailable. The compiled
kernel in ``_kernel.pyx`` mirrors this module operation for operation;
both must produce bit-identical results for identical inputs (same
floating-point expression grouping, same RNG stream, same visit order).
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

REL_EQ = 0
REL_LE = 1
REL_GE = 2


def run_sweeps(
    row_ptr,
    cols,
    coefs,
    rel,
    rhs,
    order,
    pivot_slots,
    x,
    prev,
    omega,
    tolerance,
    err_eps,
    max_sweeps,
    rng_state,
    err_trace,
):
    """Run up to ``max_sweeps`` relaxation sweeps over ``order``, in place.

    ``order`` lists the enabled row indices in visit order (highest priority
    first). A row with ``pivot_slots[row] >= 0`` uses that fixed term as its
    pivot and consumes no random draw; otherwise one draw per visit picks a
    pivot uniformly among the row's terms. Satisfied inequalities are left
    untouched. Returns ``(sweeps, final_error, converged, rng_state)``.
    """
    n = x.shape[0]
    n_rows = order.shape[0]
    sweeps = 0
    converged = False
    final_err = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max_sweeps):
            prev[:] = x
            for i in range(n_rows):
                r = int(order[i])
                start = int(row_ptr[r])
                end = int(row_ptr[r + 1])
                k = end - start
                if pivot_slots[r] >= 0:
                    slot = start + int(pivot_slots[r])
                else:
                    rng_state = (rng_state + _GAMMA) & MASK64
                    z = rng_state
                    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
                    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
                    z ^= z >> 31
                    slot = start + z % k
                ap = coefs[slot]
                acc = 0.0
                for t in range(start, end):
                    if t != slot:
                        acc = acc + coefs[t] * x[cols[t]]
                rel_r = rel[r]
                xp = x[cols[slot]]
                b = rhs[r]
                if rel_r != REL_EQ:
                    total = acc + ap * xp
                    sc = abs(b)
                    if sc < 1.0:
                        sc = 1.0
                    if rel_r == REL_LE:
                        if total <= b + tolerance * sc:
                            continue
                    else:
                        if total >= b - tolerance * sc:
                            continue
                x[cols[slot]] = omega * ((b - acc) / ap) + (1.0 - omega) * xp
            err = 0.0
            for i in range(n):
                d = abs(x[i] - prev[i])
                den = abs(x[i])
                if den < err_eps:
                    den = err_eps
                q = d / den
                # q != q propagates NaN so divergence cannot masquerade as
                # a zero-change sweep.
                if q > err or q != q:
                    err = q
            err_trace[sweeps] = err
            sweeps += 1
            final_err = float(err)
            if not np.isfinite(err):
                # Divergence: roll back to the last finite state and give up.
                x[:] = prev
                break
            if err < tolerance:
                converged = True
                break
    return sweeps, final_err, converged, rng_state


def check_satisfied(row_ptr, cols, coefs, rel, rhs, order, x, tolerance):
    """Return the first row in ``order`` violating its scaled tolerance, or -1."""
    for i in range(order.shape[0]):
        r = int(order[i])
        acc = 0.0
        for t in range(int(row_ptr[r]), int(row_ptr[r + 1])):
            acc = acc + coefs[t] * x[cols[t]]
        b = rhs[r]
        sc = abs(b)
        if sc < 1.0:
            sc = 1.0
        rel_r = rel[r]
        if rel_r == REL_EQ:
            if abs(b - acc) > tolerance * sc:
                return int(r)
        elif rel_r == REL_LE:
            if acc > b + tolerance * sc:
                return int(r)
        else:
            if acc < b - tolerance * sc:
                return int(r)
    return -1
