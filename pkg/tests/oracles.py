"""Independent high-precision and exact oracles shared by the tests."""

from fractions import Fraction

import mpmath
import numpy as np


def mp_in(iv, x) -> bool:
    """Whether the exact/mpmath number ``x`` lies in the float interval ``iv``."""
    return mpmath.mpf(iv.lo) <= x <= mpmath.mpf(iv.hi)


def frac_in(iv, q: Fraction) -> bool:
    return Fraction(iv.lo) <= q <= Fraction(iv.hi)


def weight_mp(n, mu1, mu2):
    n = abs(int(n))
    return (1 + mpmath.mpf(n)) ** mpmath.mpf(mu1) * mpmath.exp(mpmath.mpf(mu2) * n)


def full_coeffs(u):
    """Midpoint coefficients of a FourierSeq on its full box as a complex array."""
    return u.coeffs.mid()


def mp_conv1d(a, b):
    """Exact-ish (50 digit) full convolution of two centred complex coefficient lists."""
    na, nb = (len(a) - 1) // 2, (len(b) - 1) // 2
    out = [mpmath.mpc(0)] * (2 * (na + nb) + 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += mpmath.mpc(x) * mpmath.mpc(y)
    return out


def ks_galerkin_residual_mp(c, alpha, n_out=None):
    """Residual l(k) a_k + (ik/2) (a*a)_k of the KS equation in 50 digits.

    ``c`` holds centred coefficients a_{-N..N}; the result lists modes -n_out..n_out.
    """
    n = (len(c) - 1) // 2
    n_out = n if n_out is None else n_out
    sq = mp_conv1d(c, c)
    res = []
    for k in range(-n_out, n_out + 1):
        lk = -mpmath.mpf(k) ** 4 + mpmath.mpf(alpha) * k**2
        ak = mpmath.mpc(c[k + n]) if abs(k) <= n else mpmath.mpc(0)
        res.append(lk * ak + mpmath.mpc(0, k) / 2 * sq[k + 2 * n])
    return res


def mp_newton_ks(b0, alpha, n, iters=4):
    """Refine a KS odd equilibrium (u = sum_k b_k sin kx) at truncation ``n`` in mpmath.

    ``b0`` gives starting sine coefficients b_1, b_2, ...; returns
    (b_1..b_n as mpf, max residual).
    """
    alpha = mpmath.mpf(alpha)
    b = [mpmath.mpf(0)] * (n + 1)
    for k, v in enumerate(b0[:n], start=1):
        b[k] = mpmath.mpf(v)

    def resid(bv):
        # s_k = l(k) b_k + (k/2) sum_{m} b_m b_{k-m}-type terms via sin products
        # computed through the complex convolution of a_m = -i b_m/2, a_-m = i b_m/2
        a = {}
        for m in range(1, n + 1):
            a[m] = mpmath.mpc(0, -bv[m] / 2)
            a[-m] = mpmath.mpc(0, bv[m] / 2)
        out = []
        for k in range(1, n + 1):
            sq = mpmath.mpc(0)
            for m in range(k - n, n + 1):
                if m != 0 and k - m != 0 and abs(k - m) <= n:
                    sq += a[m] * a[k - m]
            lk = -mpmath.mpf(k) ** 4 + alpha * k**2
            fk = lk * a[k] + mpmath.mpc(0, k) / 2 * sq
            out.append((2j * fk).real)
        return out, a

    for _ in range(iters):
        f, a = resid(b)
        dx = mpmath.lu_solve(ks_jacobian_mp(a, alpha, n), mpmath.matrix(f))
        for j in range(1, n + 1):
            b[j] -= dx[j - 1]
    f, _ = resid(b)
    return b[1:], max(abs(x) for x in f)


def ks_jacobian_mp(a, alpha, n):
    """Matrix of ``L + DN(u)`` on sine coefficients, ``u`` given by complex coefficients ``a[k]``."""
    J = mpmath.matrix(n, n)
    for k in range(1, n + 1):
        lk = -mpmath.mpf(k) ** 4 + alpha * k**2
        for j in range(1, n + 1):
            d = lk * mpmath.mpc(0, -0.5) if j == k else mpmath.mpc(0)
            if abs(k - j) <= n and k != j:
                d += mpmath.mpc(0, k) * a[k - j] * mpmath.mpc(0, -0.5)
            if k + j <= n:
                d += mpmath.mpc(0, k) * a[k + j] * mpmath.mpc(0, 0.5)
            J[k - 1, j - 1] = (2j * d).real
    return J


def sine_to_complex(b):
    """Complex coefficients {k: a_k} of sum_k b_k sin(k x)."""
    a = {}
    for k, v in enumerate(b, start=1):
        a[k] = mpmath.mpc(0, -mpmath.mpf(v) / 2)
        a[-k] = mpmath.mpc(0, mpmath.mpf(v) / 2)
    return a


def np_cplx(x):
    return np.asarray(x, dtype=complex)
