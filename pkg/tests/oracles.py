"""Independent oracles used to freeze expected values.

The polynomial algebra here models the shift-and-derive operator
exactly over rationals: monomials are exponent tuples
(p_u, gamma, lam, g, w) -> Fraction coefficient, where g stands for the
chain element, w for its image under the base derivation, and the
derivation acts by  D(g) = w,  D(w) = -2 n^2 lam g,  D(anything else) = 0.
Nothing from the package under test is imported.
"""
from __future__ import annotations

from fractions import Fraction

# monomial key: (a, b, c, d, e) meaning p_u^a gamma^b lam^c g^d w^e
Poly = dict


def poly_scale(p: Poly, k: Fraction) -> Poly:
    return {mono: coef * k for mono, coef in p.items() if coef * k != 0}


def poly_add(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    for mono, coef in q.items():
        s = out.get(mono, Fraction(0)) + coef
        if s == 0:
            out.pop(mono, None)
        else:
            out[mono] = s
    return out


def poly_mul_mono(p: Poly, shift: tuple, k: Fraction) -> Poly:
    out = {}
    for mono, coef in p.items():
        new = tuple(m + s for m, s in zip(mono, shift))
        out[new] = out.get(new, Fraction(0)) + coef * k
    return {m: c for m, c in out.items() if c != 0}


def derive(p: Poly, n: int) -> Poly:
    """Apply the base derivation: g -> w, w -> -2 n^2 lam g."""
    out: Poly = {}
    for (a, b, c, d, e), coef in p.items():
        if d:
            mono = (a, b, c, d - 1, e + 1)
            out[mono] = out.get(mono, Fraction(0)) + coef * d
        if e:
            mono = (a, b, c + 1, d + 1, e - 1)
            out[mono] = out.get(mono, Fraction(0)) + coef * e * (-2 * n * n)
    return {m: c for m, c in out.items() if c != 0}


def shift_operator_power(m: int, n: int) -> Poly:
    """U^m applied to the chain element, U = p_u + (m/n^2) gamma D."""
    coef = Fraction(m, n * n)
    poly: Poly = {(0, 0, 0, 1, 0): Fraction(1)}
    for _ in range(m):
        term1 = poly_mul_mono(poly, (1, 0, 0, 0, 0), Fraction(1))
        term2 = poly_mul_mono(derive(poly, n), (0, 1, 0, 0, 0), coef)
        poly = poly_add(term1, term2)
    return poly


def split_pg(poly: Poly) -> tuple[Poly, Poly]:
    """Split U^m(g) = P g + D w into the two cofactor polynomials."""
    pg: Poly = {}
    dg: Poly = {}
    for (a, b, c, d, e), coef in poly.items():
        if e == 0 and d == 1:
            pg[(a, b, c)] = coef
        elif e == 1 and d == 0:
            dg[(a, b, c)] = coef
        else:
            raise AssertionError(f"unexpected monomial {(a, b, c, d, e)}")
    return pg, dg


def eval_cofactor(poly: Poly, p_u: Fraction, gamma: Fraction,
                  lam: Fraction) -> Fraction:
    total = Fraction(0)
    for (a, b, c), coef in poly.items():
        total += coef * p_u**a * gamma**b * lam**c
    return total


def closed_chain_element(n: int, g: Fraction, w: Fraction,
                         lam: Fraction) -> Fraction:
    """Closed-form chain element over rationals, for cross checks.

    Sum over k of binom(n, 2k+1) (-2 lam)^k g^(2k+1) w^(n-2k-1).
    """
    from math import comb

    total = Fraction(0)
    for k in range(0, (n - 1) // 2 + 1):
        total += comb(n, 2 * k + 1) * (-2 * lam) ** k \
            * g ** (2 * k + 1) * w ** (n - 2 * k - 1)
    return total
