"""Reference implementations that share no code with the package.

Plain lists of Fractions stand in for polynomials; mpmath supplies
high-precision floats; brute force stands in for every clever algorithm.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import mpmath


def poly_mul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    out = [x - y for x, y in zip(a, b)]
    while out and out[-1] == 0:
        out.pop()
    return out


def expand_linear_factors(roots) -> list:
    """Coefficients (lowest first) of prod (y - r)."""
    out = [Fraction(1)]
    for r in roots:
        out = poly_mul(out, [-Fraction(r), Fraction(1)])
    return out


def cross_ratio_expansion(a, b, c) -> list:
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    lhs = expand_linear_factors([a + 1, b, c])
    rhs = expand_linear_factors([a, b + 1, c + 1])
    return poly_sub(lhs, rhs)


def quadratic_formula(coeffs, dps: int = 60) -> tuple:
    """Both roots of c0 + c1 y + c2 y^2, ascending by real part."""
    with mpmath.workdps(dps):
        c0, c1, c2 = (mpmath.mpf(c.numerator) / c.denominator for c in map(Fraction, coeffs))
        disc = c1 * c1 - 4 * c2 * c0
        s = mpmath.sqrt(disc) if disc >= 0 else mpmath.mpc(0, mpmath.sqrt(-disc))
        r1, r2 = (-c1 - s) / (2 * c2), (-c1 + s) / (2 * c2)
        return tuple(sorted((r1, r2), key=lambda z: (mpmath.re(z), mpmath.im(z))))


def sylvester_matrix(a: list, b: list) -> list:
    """Sylvester matrix of two coefficient lists (lowest first)."""
    m, n = len(a) - 1, len(b) - 1
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + [Fraction(c) for c in reversed(a)] + [Fraction(0)] * (n - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + [Fraction(c) for c in reversed(b)] + [Fraction(0)] * (m - 1 - i))
    return rows


def leibniz_det(m) -> Fraction:
    n = len(m)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = Fraction(1)
        for i in range(n):
            prod *= m[i][perm[i]]
            if prod == 0:
                break
        total += -prod if inv % 2 else prod
    return total


def kron(a, b) -> list:
    ra, ca, rb, cb = len(a), len(a[0]), len(b), len(b[0])
    return [[a[i // rb][j // cb] * b[i % rb][j % cb] for j in range(ca * cb)] for i in range(ra * rb)]


def partitions_brute(total: int, parts: int) -> set:
    """Multisets of ``parts`` positive integers summing to ``total``."""
    return {c for c in itertools.combinations_with_replacement(range(1, total + 1), parts)
            if sum(c) == total}


def row_from_printed_formulas(seeds, perm: int, dps: int = 60) -> list:
    """The three log-coefficients as printed, evaluated in mpmath."""
    with mpmath.workdps(dps):
        y0, y1, y2 = (mpmath.mpf(Fraction(s).numerator) / Fraction(s).denominator for s in seeds)
        head = {0: (seeds[0], seeds[1], seeds[2]), 1: (seeds[1], seeds[2], seeds[0]),
                2: (seeds[2], seeds[0], seeds[1])}[perm]
        al, be = quadratic_formula(cross_ratio_expansion(*head), dps)

        def g(t):
            return (t - al) / (t - be)

        def L(t):
            return mpmath.log(abs(t))

        if perm == 0:
            return [-L(g((y1 + y2 + 1) / 2)), L(g(y0) / (g(y1 + 1) * g(y2 + 1))), L(g(y2 + 1) / g(y2))]
        if perm == 1:
            return [-L(g((y2 + y0 + 1) / 2)), L(g(y1 + 1) / (g(y0) * g(y2 + 1))), L(g(y2 + 1) / g(y2))]
        return [-L(g((y0 + y1 + 1) / 2)), L(g(y2 + 1) / (g(y0) * g(y1 + 1))), -L(g(y2 + 1) / g(y2))]


def det3(m):
    (a, b, c), (d, e, f), (g, h, i) = m
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
