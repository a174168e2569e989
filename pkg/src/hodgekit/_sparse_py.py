"""Pure-Python CSR kernels over Gaussian integers.

Same contract as the compiled ``_sparse_ext`` module: matrices are given as
CSR arrays ``(indptr, indices, re, im)`` of Gaussian-integer numerators and
results come back as four lists with sorted column indices and no explicit
zeros.  Python ints never overflow, so this path also serves as the
big-number fallback for the compiled kernels.
"""
import math


def matmul(ap, ai, ar, aim, bp, bi, br, bim, nrows, ncols):
    ap = [int(x) for x in ap]
    ai = [int(x) for x in ai]
    bp = [int(x) for x in bp]
    bi = [int(x) for x in bi]
    ar = [int(x) for x in ar]
    aim = [int(x) for x in aim]
    br = [int(x) for x in br]
    bim = [int(x) for x in bim]
    op, oi, ore, oim = [0], [], [], []
    for r in range(nrows):
        acc = {}
        for t in range(ap[r], ap[r + 1]):
            k = ai[t]
            xr, xi = ar[t], aim[t]
            for s in range(bp[k], bp[k + 1]):
                c = bi[s]
                yr, yi = br[s], bim[s]
                pr = xr * yr - xi * yi
                pi = xr * yi + xi * yr
                if c in acc:
                    q = acc[c]
                    acc[c] = (q[0] + pr, q[1] + pi)
                else:
                    acc[c] = (pr, pi)
        for c in sorted(acc):
            vr, vi = acc[c]
            if vr or vi:
                oi.append(c)
                ore.append(vr)
                oim.append(vi)
        op.append(len(oi))
    return op, oi, ore, oim


def lincomb(ap, ai, ar, aim, sa_re, sa_im, bp, bi, br, bim, sb_re, sb_im, nrows):
    """``sa*A + sb*B`` for Gaussian-integer scalars ``sa``, ``sb``."""
    op, oi, ore, oim = [0], [], [], []
    for r in range(nrows):
        row = {}
        for t in range(int(ap[r]), int(ap[r + 1])):
            xr, xi = int(ar[t]), int(aim[t])
            row[int(ai[t])] = (sa_re * xr - sa_im * xi, sa_re * xi + sa_im * xr)
        for t in range(int(bp[r]), int(bp[r + 1])):
            c = int(bi[t])
            xr, xi = int(br[t]), int(bim[t])
            pr, pi = sb_re * xr - sb_im * xi, sb_re * xi + sb_im * xr
            if c in row:
                q = row[c]
                row[c] = (q[0] + pr, q[1] + pi)
            else:
                row[c] = (pr, pi)
        for c in sorted(row):
            vr, vi = row[c]
            if vr or vi:
                oi.append(c)
                ore.append(vr)
                oim.append(vi)
        op.append(len(oi))
    return op, oi, ore, oim


def gcd_maxabs(re, im, den):
    """``(gcd(re, im, den), max(|re| + |im|))`` over Python ints."""
    g, mx = int(den), 0
    for a, b in zip(re, im):
        a, b = int(a), int(b)
        mx = max(mx, abs(a) + abs(b))
        if g != 1:
            g = math.gcd(g, a, b)
    return g, mx
