# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled series kernels.

Same contract as ``wachforge._kernels_py``.  Coefficients are arbitrary
precision Python integers; the speedup comes from typed loop indices and
skipping zero blocks without building intermediate slices.
"""


def series_mul(list a, list b, Py_ssize_t D, Py_ssize_t e, tuple g, object mod):
    cdef Py_ssize_t i, j, s, t, n, top, k, lo, base, width
    cdef list out, acc
    cdef object x, y, c
    if e == 1:
        out = [0] * D
        for j in range(D):
            x = a[j]
            if not x:
                continue
            for i in range(D - j):
                y = b[i]
                if y:
                    out[i + j] += x * y
        for i in range(D):
            out[i] = out[i] % mod
        return out
    width = 2 * e - 1
    acc = [0] * (D * width)
    for i in range(D):
        for j in range(D - i):
            base = (i + j) * width
            for s in range(e):
                x = a[i * e + s]
                if not x:
                    continue
                for t in range(e):
                    y = b[j * e + t]
                    if y:
                        acc[base + s + t] += x * y
    out = [0] * (D * e)
    for n in range(D):
        base = n * width
        for top in range(width - 1, e - 1, -1):
            c = acc[base + top]
            if c:
                lo = base + top - e
                for k in range(e):
                    acc[lo + k] -= c * g[k]
        for k in range(e):
            out[n * e + k] = acc[base + k] % mod
    return out


def series_compose(list a, list powers, Py_ssize_t D, Py_ssize_t e, object mod):
    cdef Py_ssize_t i, j, k, base
    cdef list out = [0] * (D * e)
    cdef list pw
    cdef object c, x
    for j in range(D):
        pw = powers[j]
        for k in range(e):
            x = a[j * e + k]
            if not x:
                continue
            for i in range(j, D):
                c = pw[i]
                if c:
                    out[i * e + k] += x * c
    for i in range(D * e):
        out[i] = out[i] % mod
    return out
