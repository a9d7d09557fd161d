"""Pure-Python series kernels (fallback for the compiled extension).

Series are flat lists: coefficient ``j`` of the series occupies
``data[j*e:(j+1)*e]``, an element of O_E = Z_p[x]/(g) with ``e = deg g``.
``g`` holds the non-leading coefficients of the monic modulus.
"""


def series_mul(a, b, D, e, g, mod):
    if e == 1:
        out = [0] * D
        nz = [(j, x) for j, x in enumerate(a) if x]
        for i, y in enumerate(b):
            if y:
                for j, x in nz:
                    if i + j >= D:
                        break
                    out[i + j] += x * y
        return [c % mod for c in out]
    width = 2 * e - 1
    acc = [0] * (D * width)
    for i in range(D):
        ai = a[i * e:(i + 1) * e]
        if not any(ai):
            continue
        for j in range(D - i):
            bj = b[j * e:(j + 1) * e]
            base = (i + j) * width
            for s, x in enumerate(ai):
                if x:
                    for t, y in enumerate(bj):
                        if y:
                            acc[base + s + t] += x * y
    out = [0] * (D * e)
    for n in range(D):
        prod = acc[n * width:(n + 1) * width]
        for top in range(width - 1, e - 1, -1):
            c = prod[top]
            if c:
                lo = top - e
                for k in range(e):
                    prod[lo + k] -= c * g[k]
        for k in range(e):
            out[n * e + k] = prod[k] % mod
    return out


def series_compose(a, powers, D, e, mod):
    """Evaluate sum_j a_j s^j, with ``powers[j]`` the integer coefficients of s^j.

    ``s`` must have zero constant term so that s^j vanishes below degree j.
    """
    out = [0] * (D * e)
    for j in range(D):
        aj = a[j * e:(j + 1) * e]
        if not any(aj):
            continue
        pw = powers[j]
        for i in range(j, D):
            c = pw[i]
            if c:
                base = i * e
                for k in range(e):
                    out[base + k] += aj[k] * c
    return [c % mod for c in out]
