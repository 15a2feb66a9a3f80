"""Dirichlet spectrum of the rectangle (0, a*pi) x (0, b*pi).

Eigenvalues are ``m**2/a**2 + n**2/b**2`` with eigenfunctions
``sin(m x / a) sin(n y / b)``. When the squared side lengths are rational
(pass :class:`fractions.Fraction` or ``a_sq`` / ``b_sq``) all comparisons are
exact; otherwise two values are merged when their relative gap is below
``REL_TOL``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError

REL_TOL = 1e-12
MAX_DENOMINATOR = 10 ** 6


@dataclass(frozen=True)
class RectEigenvalue:
    m: int
    n: int
    value: object  # Fraction or float
    rank: int
    multiplicity: int


def _squares(a, b, a_sq=None, b_sq=None):
    if a_sq is None:
        a_sq = a * a if isinstance(a, (int, Fraction)) else float(a) ** 2
    if b_sq is None:
        b_sq = b * b if isinstance(b, (int, Fraction)) else float(b) ** 2
    if not (a_sq > 0 and b_sq > 0):
        raise ConfigError("rectangle sides must be positive")
    exact = isinstance(a_sq, (int, Fraction)) and isinstance(b_sq, (int, Fraction))
    if exact:
        return Fraction(a_sq), Fraction(b_sq), True
    return float(a_sq), float(b_sq), False


def _value(m, n, a_sq, b_sq):
    return m * m / a_sq + n * n / b_sq


def _same(u, v, exact):
    if exact:
        return u == v
    return abs(u - v) <= REL_TOL * max(abs(u), abs(v))


def _pairs_below(a_sq, b_sq, lam, strict):
    """All (m, n, value) with value < lam (or <= lam)."""
    out = []
    m = 1
    while m * m / a_sq < lam or (not strict and m * m / a_sq <= lam):
        n = 1
        while True:
            v = _value(m, n, a_sq, b_sq)
            if v > lam or (strict and v >= lam):
                break
            out.append((m, n, v))
            n += 1
        m += 1
    return out


def rect_spectrum(a, b, K, *, a_sq=None, b_sq=None):
    """First ``K`` eigenvalues of the rectangle, with multiplicity.

    Ties at the cutoff are kept in full within the returned list's
    multiplicity field but the list itself has exactly ``K`` entries, ordered
    by value then ``m``.
    """
    if K < 1:
        raise ConfigError("K must be >= 1")
    A2, B2, exact = _squares(a, b, a_sq, b_sq)
    # Weyl guess for the K-th value, doubled until enough pairs are found
    lam = max(4 * K / (math.pi * math.sqrt(float(A2 * B2))), float(1 / A2 + 1 / B2)) * 1.5
    if exact:
        lam = Fraction(lam).limit_denominator(10 ** 6) + 1
    while True:
        pairs = _pairs_below(A2, B2, lam, strict=False)
        if len(pairs) >= K:
            break
        lam = lam * 2
    pairs.sort(key=lambda t: (t[2], t[0]))
    out = []
    i = 0
    rank_start = 1
    while i < len(pairs) and len(out) < K:
        j = i
        while j + 1 < len(pairs) and _same(pairs[j + 1][2], pairs[i][2], exact):
            j += 1
        mult = j - i + 1
        for t in pairs[i:j + 1]:
            if len(out) < K:
                out.append(RectEigenvalue(t[0], t[1], t[2], rank_start, mult))
        rank_start += mult
        i = j + 1
    return out


def counting_function(a, b, lam, *, a_sq=None, b_sq=None):
    """Number of pairs with eigenvalue strictly below ``lam``."""
    if not lam > 0:
        raise ConfigError("lambda must be positive")
    A2, B2, exact = _squares(a, b, a_sq, b_sq)
    if exact and isinstance(lam, (int, Fraction)):
        return len(_pairs_below(A2, B2, Fraction(lam), strict=True))
    lam = float(lam) * (1 - REL_TOL)
    return len(_pairs_below(float(A2), float(B2), lam, strict=True))


def mu_product(m, n):
    """Nodal-domain count of sin(mx/a) sin(ny/b)."""
    if m < 1 or n < 1:
        raise ConfigError("m, n must be >= 1")
    return m * n


def pleijel_quotient(m, n, b):
    """``4mn / (pi (m^2 b + n^2 / b))``: nodal count over Weyl rank on R(1, b)."""
    b = float(b)
    return 4 * m * n / (math.pi * (m * m * b + n * n / b))


def convergents(b, max_denominator=MAX_DENOMINATOR):
    """Continued-fraction convergents ``(n_k, m_k)`` with ``n_k / m_k -> b``.

    Stops once the denominator exceeds ``max_denominator`` or the expansion
    terminates (``b`` rational). Returns ``(list, exact)``.
    """
    if isinstance(b, (int, Fraction)):
        x = Fraction(b)
    else:
        x = float(b)
    p0, q0, p1, q1 = 0, 1, 1, 0
    out = []
    for _ in range(200):
        a_k = math.floor(x)
        p0, q0, p1, q1 = p1, q1, a_k * p1 + p0, a_k * q1 + q0
        if q1 > max_denominator:
            break
        out.append((p1, q1))
        frac = x - a_k
        if frac == 0 or (not isinstance(x, Fraction) and abs(p1 / q1 - float(b)) <= 1e-15 * abs(float(b))):
            return out, True
        x = 1 / frac
    return out, False


@dataclass
class PleijelSequence:
    convergents: list
    quotients: list
    terminated: bool  # an exact convergent was reached


def pleijel_limit_sequence(b, K):
    """Quotients ``P(m_k, n_k; b)`` along the first ``K`` convergents ``n_k / m_k`` of ``b``."""
    if K < 1:
        raise ConfigError("K must be >= 1")
    if not b > 0:
        raise ConfigError("b must be positive")
    conv, exact = convergents(b)
    conv = [(n, m) for n, m in conv if n >= 1]
    q = [pleijel_quotient(m, n, b) for n, m in conv[:K]]
    return PleijelSequence(conv[:K], q, exact and len(conv) <= K)


# ---------------------------------------------------------------------------


@dataclass
class CourantRow:
    rank: int
    m: int
    n: int
    value: object
    multiplicity: int
    mu_lattice: int  # sup of m*n over the eigenspace's lattice pairs
    mu_max: int | None  # max nodal count over the eigenspace (None: undetermined)
    courant_sharp: bool | None


def eigenspaces(a, b, lam_max, *, a_sq=None, b_sq=None):
    """Eigenvalues up to ``lam_max`` grouped into eigenspaces: ``[(first_rank, value, pairs)]``."""
    A2, B2, exact = _squares(a, b, a_sq, b_sq)
    lm = Fraction(lam_max) if exact else float(lam_max) * (1 + REL_TOL)
    pairs = sorted(_pairs_below(A2, B2, lm, strict=False), key=lambda t: (t[2], t[0]))
    out = []
    i = 0
    rank = 1
    while i < len(pairs):
        j = i
        while j + 1 < len(pairs) and _same(pairs[j + 1][2], pairs[i][2], exact):
            j += 1
        out.append((rank, pairs[i][2], [(t[0], t[1]) for t in pairs[i:j + 1]]))
        rank += j - i + 1
        i = j + 1
    return out


def courant_sharp_scan(a, b, lam_max, *, a_sq=None, b_sq=None, theta_count=256, h=None):
    """Courant-sharp classification of every eigenvalue up to ``lam_max``.

    Simple eigenvalues use ``m*n``. Two-dimensional eigenspaces are swept
    over ``cos(t) phi_1 + sin(t) phi_2`` on a grid; larger eigenspaces are
    reported as undetermined. Only the first rank of an eigenspace can be
    Courant sharp, since every eigenfunction there has at most that many
    nodal domains.
    """
    from . import nodal

    rows = []
    for rank, value, pairs in eigenspaces(a, b, lam_max, a_sq=a_sq, b_sq=b_sq):
        mult = len(pairs)
        mu_lat = max(m * n for m, n in pairs)
        if mult == 1:
            mu = mu_lat
        elif mult == 2:
            mu = nodal.rect_theta_sweep(pairs[0], pairs[1], float(a), float(b),
                                        theta_count=theta_count, h=h).max_mu
        else:
            mu = None
        for off, (m, n) in enumerate(pairs):
            sharp = None if mu is None else (off == 0 and mu == rank)
            rows.append(CourantRow(rank + off, m, n, value, mult, mu_lat, mu, sharp))
    return rows
