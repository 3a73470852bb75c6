# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled enumeration kernels (int64).

Callers must check the int64 safety guards in ``levelpoints.kernels`` first;
nothing here detects overflow.  The loops run without the GIL so the outer
coordinate range can be split across threads.
"""

from libc.math cimport sqrt
from libcpp.vector cimport vector

BACKEND = "cython"

ctypedef long long i64


cdef inline i64 _floordiv(i64 a, i64 b) noexcept nogil:
    cdef i64 q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef inline i64 _mod(i64 a, i64 b) noexcept nogil:
    # b > 0
    cdef i64 r = a % b
    if r < 0:
        r += b
    return r


cdef inline i64 _gcd(i64 a, i64 b) noexcept nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef inline i64 _inverse(i64 a, i64 mod) noexcept nogil:
    # a coprime to mod > 1
    cdef i64 t = 0, nt = 1, r = mod, nr = _mod(a, mod), q
    while nr:
        q = r / nr
        t, nt = nt, t - q * nt
        r, nr = nr, r - q * nr
    return _mod(t, mod)


cdef inline i64 _isqrt(i64 D) noexcept nogil:
    cdef i64 s = <i64>sqrt(<double>D)
    while s * s > D:
        s -= 1
    while (s + 1) * (s + 1) <= D:
        s += 1
    return s


cdef list _rows(vector[i64]& buf, int width):
    cdef Py_ssize_t k, n = buf.size() // width
    cdef int j
    out = []
    for k in range(n):
        out.append(tuple([buf[k * width + j] for j in range(width)]))
    return out


cdef void _det2(i64 m, i64* L, i64* H, i64 lo, i64 hi, vector[i64]& out) noexcept nogil:
    cdef i64 a, b, c, d, aa, g, step, c0, clo, chi, t_lo, t_hi, tmp
    if lo < L[0]:
        lo = L[0]
    if hi > H[0]:
        hi = H[0]
    a = lo
    while a <= hi:
        if a == 0:
            for b in range(L[1], H[1] + 1):
                if b == 0 or m % b != 0:
                    continue
                c = -(m / b)
                if c < L[2] or c > H[2]:
                    continue
                for d in range(L[3], H[3] + 1):
                    out.push_back(0)
                    out.push_back(b)
                    out.push_back(c)
                    out.push_back(d)
            a += 1
            continue
        aa = a if a > 0 else -a
        t_lo = a * L[3]
        t_hi = a * H[3]
        if t_lo > t_hi:
            tmp = t_lo
            t_lo = t_hi
            t_hi = tmp
        for b in range(L[1], H[1] + 1):
            g = _gcd(b, aa)
            if m % g != 0:
                continue
            step = aa / g
            if step == 1:
                c0 = 0
            else:
                c0 = _mod(-(m / g) * _inverse(b / g, step), step)
            if b == 0:
                if m < t_lo or m > t_hi:
                    continue
                clo = L[2]
                chi = H[2]
            elif b > 0:
                clo = -_floordiv(m - t_lo, b)
                chi = _floordiv(t_hi - m, b)
            else:
                clo = -_floordiv(m - t_hi, b)
                chi = _floordiv(t_lo - m, b)
            if clo < L[2]:
                clo = L[2]
            if chi > H[2]:
                chi = H[2]
            if clo > chi:
                continue
            c = clo + _mod(c0 - clo, step)
            while c <= chi:
                out.push_back(a)
                out.push_back(b)
                out.push_back(c)
                out.push_back((m + b * c) / a)
                c += step
        a += 1


def det2_points(i64 m, L, H, i64 lo, i64 hi):
    cdef i64 cL[4]
    cdef i64 cH[4]
    cdef vector[i64] out
    for j in range(4):
        cL[j] = L[j]
        cH[j] = H[j]
    with nogil:
        _det2(m, cL, cH, lo, hi, out)
    return _rows(out, 4)


cdef void _pff2(i64 m, i64* L, i64* H, i64 lo, i64 hi, vector[i64]& out) noexcept nogil:
    cdef i64 x12, x13, x14, x23, x24, x34, p, r, ar, a_lo, a_hi
    if lo < L[1]:
        lo = L[1]
    if hi > H[1]:
        hi = H[1]
    x13 = lo
    while x13 <= hi:
        for x24 in range(L[4], H[4] + 1):
            p = x13 * x24 - m
            for x14 in range(L[2], H[2] + 1):
                for x23 in range(L[3], H[3] + 1):
                    r = p - x14 * x23
                    if r == 0:
                        if L[0] <= 0 <= H[0]:
                            for x34 in range(L[5], H[5] + 1):
                                out.push_back(0); out.push_back(x13); out.push_back(x14)
                                out.push_back(x23); out.push_back(x24); out.push_back(x34)
                        if L[5] <= 0 <= H[5]:
                            for x12 in range(L[0], H[0] + 1):
                                if x12 != 0:
                                    out.push_back(x12); out.push_back(x13); out.push_back(x14)
                                    out.push_back(x23); out.push_back(x24); out.push_back(0)
                        continue
                    ar = r if r > 0 else -r
                    a_lo = L[0] if L[0] > -ar else -ar
                    a_hi = H[0] if H[0] < ar else ar
                    for x12 in range(a_lo, a_hi + 1):
                        if x12 != 0 and r % x12 == 0:
                            x34 = r / x12
                            if L[5] <= x34 <= H[5]:
                                out.push_back(x12); out.push_back(x13); out.push_back(x14)
                                out.push_back(x23); out.push_back(x24); out.push_back(x34)
        x13 += 1


def pff2_points(i64 m, L, H, i64 lo, i64 hi):
    cdef i64 cL[6]
    cdef i64 cH[6]
    cdef vector[i64] out
    for j in range(6):
        cL[j] = L[j]
        cH[j] = H[j]
    with nogil:
        _pff2(m, cL, cH, lo, hi, out)
    return _rows(out, 6)


cdef void _quad(i64 m, int N, i64* q, i64* L, i64* H, i64 lo, i64 hi,
                vector[i64]& out) noexcept nogil:
    # q is the N x N upper-triangular coefficient matrix, row-major.
    cdef int P = N - 1      # index of the solved coordinate
    cdef int Y = N - 2      # innermost iterated coordinate
    cdef int K = N - 2      # number of odometer coordinates (indices 0..K-1)
    cdef int i, j
    cdef i64 a = q[P * N + P]
    cdef i64 y, y_lo, y_hi, cu, bu, ly, B, C, D, s, num, w, den = 2 * a
    cdef i64 qyy = q[Y * N + Y], qyw = q[Y * N + P]
    cdef vector[i64] u
    u.resize(K if K > 0 else 1)
    if K == 0:
        y_lo = lo if lo > L[0] else L[0]
        y_hi = hi if hi < H[0] else H[0]
    else:
        y_lo = L[Y]
        y_hi = H[Y]
        for i in range(K):
            u[i] = L[i]
        if lo > u[0]:
            u[0] = lo
        if hi > H[0]:
            hi = H[0]
        if u[0] > hi:
            return
    if y_lo > y_hi or L[P] > H[P]:
        return
    while True:
        cu = -m
        bu = 0
        ly = 0
        for i in range(K):
            bu += q[i * N + P] * u[i]
            ly += q[i * N + Y] * u[i]
            for j in range(i, K):
                cu += q[i * N + j] * u[i] * u[j]
        for y in range(y_lo, y_hi + 1):
            B = bu + qyw * y
            C = cu + (ly + qyy * y) * y
            D = B * B - 4 * a * C
            if D < 0:
                continue
            s = _isqrt(D)
            if s * s != D:
                continue
            num = -B + s
            if num % den == 0:
                w = num / den
                if L[P] <= w <= H[P]:
                    for i in range(K):
                        out.push_back(u[i])
                    out.push_back(y)
                    out.push_back(w)
            if s != 0:
                num = -B - s
                if num % den == 0:
                    w = num / den
                    if L[P] <= w <= H[P]:
                        for i in range(K):
                            out.push_back(u[i])
                        out.push_back(y)
                        out.push_back(w)
        # advance odometer
        i = K - 1
        while i >= 0:
            u[i] += 1
            if u[i] <= (hi if i == 0 else H[i]):
                break
            u[i] = L[i] if i > 0 else lo
            i -= 1
        if i < 0:
            return


def quad_points(i64 m, q, L, H, i64 lo, i64 hi):
    cdef int N = len(q)
    cdef vector[i64] cq, cL, cH
    cdef vector[i64] out
    for row in q:
        for v in row:
            cq.push_back(v)
    for v in L:
        cL.push_back(v)
    for v in H:
        cH.push_back(v)
    if lo < cL[0]:
        lo = cL[0]
    with nogil:
        _quad(m, N, cq.data(), cL.data(), cH.data(), lo, hi, out)
    return _rows(out, N)
