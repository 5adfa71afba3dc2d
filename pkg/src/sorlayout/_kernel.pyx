# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: initializedcheck=False
# cython: cdivision=True
"""Compiled solver kernel.

Mirrors ``sorlayout._kernel_py`` operation for operation; both backends
must produce bit-identical results for identical inputs. Keep expression
grouping in sync with the Python fallback (and compile with fp-contract
off) when editing.
"""

from libc.math cimport fabs, isfinite

ctypedef unsigned long long u64


cdef inline u64 _next_u64(u64* state) noexcept nogil:
    cdef u64 z
    state[0] = state[0] + <u64>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EB
    return z ^ (z >> 31)


def run_sweeps(int[::1] row_ptr, int[::1] cols, double[::1] coefs,
               signed char[::1] rel, double[::1] rhs,
               int[::1] order, int[::1] pivot_slots,
               double[::1] x, double[::1] prev,
               double omega, double tolerance, double err_eps,
               int max_sweeps, u64 rng_state, double[::1] err_trace):
    """Run up to ``max_sweeps`` relaxation sweeps over ``order``, in place.

    Returns ``(sweeps, final_error, converged, rng_state)``. See the Python
    fallback for the full contract.
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t n_rows = order.shape[0]
    cdef Py_ssize_t i, t, start, end, slot
    cdef int r, k
    cdef signed char rel_r
    cdef double acc, ap, xp, total, b, sc, err, d, den, q
    cdef int sweeps = 0
    cdef bint converged = False
    cdef double final_err = 0.0
    cdef int sweep

    with nogil:
        for sweep in range(max_sweeps):
            for i in range(n):
                prev[i] = x[i]
            for i in range(n_rows):
                r = order[i]
                start = row_ptr[r]
                end = row_ptr[r + 1]
                k = <int>(end - start)
                if pivot_slots[r] >= 0:
                    slot = start + pivot_slots[r]
                else:
                    slot = start + <Py_ssize_t>(_next_u64(&rng_state) % <u64>k)
                ap = coefs[slot]
                acc = 0.0
                for t in range(start, end):
                    if t != slot:
                        acc = acc + coefs[t] * x[cols[t]]
                rel_r = rel[r]
                xp = x[cols[slot]]
                b = rhs[r]
                if rel_r != 0:
                    total = acc + ap * xp
                    sc = fabs(b)
                    if sc < 1.0:
                        sc = 1.0
                    if rel_r == 1:
                        if total <= b + tolerance * sc:
                            continue
                    else:
                        if total >= b - tolerance * sc:
                            continue
                x[cols[slot]] = omega * ((b - acc) / ap) + (1.0 - omega) * xp
            err = 0.0
            for i in range(n):
                d = fabs(x[i] - prev[i])
                den = fabs(x[i])
                if den < err_eps:
                    den = err_eps
                q = d / den
                # q != q propagates NaN so divergence cannot masquerade as a
                # zero-change sweep.
                if q > err or q != q:
                    err = q
            err_trace[sweeps] = err
            sweeps = sweeps + 1
            final_err = err
            if not isfinite(err):
                for i in range(n):
                    x[i] = prev[i]
                break
            if err < tolerance:
                converged = True
                break
    return sweeps, final_err, converged, rng_state


def check_satisfied(int[::1] row_ptr, int[::1] cols, double[::1] coefs,
                    signed char[::1] rel, double[::1] rhs,
                    int[::1] order, double[::1] x, double tolerance):
    """Return the first row in ``order`` violating its scaled tolerance, or -1."""
    cdef Py_ssize_t i, t
    cdef int r
    cdef signed char rel_r
    cdef double acc, b, sc
    cdef int violated = -1
    with nogil:
        for i in range(order.shape[0]):
            r = order[i]
            acc = 0.0
            for t in range(row_ptr[r], row_ptr[r + 1]):
                acc = acc + coefs[t] * x[cols[t]]
            b = rhs[r]
            sc = fabs(b)
            if sc < 1.0:
                sc = 1.0
            rel_r = rel[r]
            if rel_r == 0:
                if fabs(b - acc) > tolerance * sc:
                    violated = r
                    break
            elif rel_r == 1:
                if acc > b + tolerance * sc:
                    violated = r
                    break
            else:
                if acc < b - tolerance * sc:
                    violated = r
                    break
    return violated
