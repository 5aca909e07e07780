"""GF(2^8) arithmetic and Reed-Solomon coding over it.

Field generated by alpha=2 with reduction polynomial
x^8 + x^4 + x^3 + x^2 + 1 (0x11d), the polynomial used by the QR symbology.
Codewords are 8-bit symbols; one RS block = data codewords followed by
parity codewords (remainder of synthetic division by the generator poly).
"""

from __future__ import annotations

PRIME_POLY = 0x11D

EXP = [0] * 512  # doubled so products of two logs never need a mod
LOG = [0] * 256

_x = 1
for _i in range(255):
    EXP[_i] = _x
    LOG[_x] = _i
    _x <<= 1
    if _x & 0x100:
        _x ^= PRIME_POLY
for _i in range(255, 512):
    EXP[_i] = EXP[_i - 255]


class DecodeFailure(Exception):
    """Block has more corrupted codewords than the parity can correct."""


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return EXP[LOG[a] + LOG[b]]


def gf_div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("division by zero in GF(256)")
    if a == 0:
        return 0
    return EXP[(LOG[a] - LOG[b]) % 255]


def gf_inv(a: int) -> int:
    return EXP[255 - LOG[a]]


def poly_mul(p: list[int], q: list[int]) -> list[int]:
    """Product of two polynomials, both coefficient-highest-degree-first."""
    r = [0] * (len(p) + len(q) - 1)
    for j, qj in enumerate(q):
        if qj == 0:
            continue
        lq = LOG[qj]
        for i, pi in enumerate(p):
            if pi:
                r[i + j] ^= EXP[LOG[pi] + lq]
    return r


def poly_eval(p: list[int], x: int) -> int:
    """Horner evaluation; coefficients highest degree first."""
    y = p[0]
    for c in p[1:]:
        y = gf_mul(y, x) ^ c
    return y


def generator_poly(nsym: int) -> list[int]:
    """(x - a^0)(x - a^1)...(x - a^(nsym-1)), coefficients highest first."""
    g = [1]
    for i in range(nsym):
        g = poly_mul(g, [1, EXP[i]])
    return g


_GEN_CACHE: dict[int, list[int]] = {}


def rs_encode_block(data: list[int], nsym: int) -> list[int]:
    """Return data + nsym parity codewords."""
    gen = _GEN_CACHE.get(nsym)
    if gen is None:
        gen = _GEN_CACHE[nsym] = generator_poly(nsym)
    rem = list(data) + [0] * nsym
    for i in range(len(data)):
        coef = rem[i]
        if coef == 0:
            continue
        lc = LOG[coef]
        for j in range(1, len(gen)):
            rem[i + j] ^= EXP[LOG[gen[j]] + lc]
    return list(data) + rem[len(data):]


def _syndromes(block: list[int], nsym: int) -> list[int]:
    return [poly_eval(block, EXP[i]) for i in range(nsym)]


def _berlekamp_massey(synd: list[int]) -> list[int]:
    """Error locator polynomial (highest degree first) from syndromes."""
    err_loc = [1]
    old_loc = [1]
    for i in range(len(synd)):
        old_loc.append(0)
        delta = synd[i]
        for j in range(1, len(err_loc)):
            delta ^= gf_mul(err_loc[-(j + 1)], synd[i - j])
        if delta != 0:
            if len(old_loc) > len(err_loc):
                new_loc = [gf_mul(c, delta) for c in old_loc]
                old_loc = [gf_mul(c, gf_inv(delta)) for c in err_loc]
                err_loc = new_loc
            scaled = [gf_mul(c, delta) for c in old_loc]
            size = max(len(err_loc), len(scaled))
            merged = [0] * size
            for k, c in enumerate(reversed(err_loc)):
                merged[size - 1 - k] ^= c
            for k, c in enumerate(reversed(scaled)):
                merged[size - 1 - k] ^= c
            err_loc = merged
    while err_loc and err_loc[0] == 0:
        err_loc.pop(0)
    return err_loc


def rs_decode_block(block: list[int], nsym: int) -> tuple[list[int], int]:
    """Correct up to nsym//2 corrupted codewords in a received block.

    Returns (corrected block, number of corrected codewords).
    Raises DecodeFailure when the block is beyond repair.
    """
    n = len(block)
    synd = _syndromes(block, nsym)
    if max(synd) == 0:
        return list(block), 0

    err_loc = _berlekamp_massey(synd)
    n_err = len(err_loc) - 1
    if not err_loc or n_err * 2 > nsym:
        raise DecodeFailure("error locator degree exceeds correction radius")

    # Chien search over codeword degrees e: Lambda(alpha^-e) == 0 marks an error
    # in the coefficient of x^e, i.e. at list index n-1-e.
    positions = []
    for e in range(n):
        if poly_eval(err_loc, EXP[(255 - e) % 255]) == 0:
            positions.append(n - 1 - e)
    if len(positions) != n_err:
        raise DecodeFailure("error locator roots do not match its degree")

    # Forney: Omega = S(x)*Lambda(x) mod x^nsym, then
    # Y_k = Omega(X_k^-1) / prod_{j != k} (1 - X_j * X_k^-1) with X_k = alpha^e_k.
    omega = poly_mul(synd[::-1], err_loc)
    if len(omega) > nsym:
        omega = omega[len(omega) - nsym:]
    X = [EXP[n - 1 - p] for p in positions]
    corrected = list(block)
    for i, xi in enumerate(X):
        xi_inv = gf_inv(xi)
        denom = 1
        for j, xj in enumerate(X):
            if j != i:
                denom = gf_mul(denom, 1 ^ gf_mul(xi_inv, xj))
        if denom == 0:
            raise DecodeFailure("degenerate locator derivative")
        magnitude = gf_div(poly_eval(omega, xi_inv), denom)
        corrected[positions[i]] ^= magnitude

    if max(_syndromes(corrected, nsym)) != 0:
        raise DecodeFailure("residual syndromes after correction")
    return corrected, n_err
