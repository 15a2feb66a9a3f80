"""Explicit constants and inequalities about Dirichlet energies of planar domains."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from . import eigen, geometry, rect
from .errors import ConfigError, ResolutionError
from .report import BoundReport

HEX_PACKING = math.pi / math.sqrt(12)  # density of the hexagonal disk packing
BLIND_P = 0.743
FK_ALLOWANCE = 0.02


def lambda_domain(domain, accuracy=1e-4):
    """Ground energy: closed form for disks and rectangles, extrapolated grid solve otherwise."""
    if domain.kind == "disk":
        return eigen.disk_energy(geometry.area(domain))
    if domain.kind == "rectangle":
        a, b = domain.params
        return 1 / a ** 2 + 1 / b ** 2
    return eigen.groundstate_energy(domain, accuracy).value


# ---------------------------------------------------------------------------
# constants


@dataclass
class PleijelConstants:
    nu_pl: float
    nu_hex: float
    ratio: float  # lambda(Disk_1) / lambda(Hexa_1)
    polterovich: float
    lambda_disk1: float
    lambda_hexa1: float

    def as_dict(self):
        return dict(self.__dict__)


def pleijel_constants(accuracy=1e-5):
    """``4 pi / lambda(Disk_1)``, ``4 pi / lambda(Hexa_1)``, their ratio and ``2 / pi``."""
    ld = eigen.lambda_disk1()
    lh = eigen.groundstate_energy(geometry.HEXA1, accuracy).value
    return PleijelConstants(4 * math.pi / ld, 4 * math.pi / lh, ld / lh, 2 / math.pi, ld, lh)


def area_normalized(domain):
    return domain.scaled(1 / math.sqrt(geometry.area(domain)))


# ---------------------------------------------------------------------------
# isoperimetric-type inequalities


def faber_krahn_check(domain, accuracy=1e-4):
    """``A lambda_1 >= lambda(Disk_1)`` with a 2% discretization allowance."""
    ld = eigen.lambda_disk1()
    A = geometry.area(domain)
    right = A * lambda_domain(domain, accuracy)
    eq = domain.kind == "disk"
    return BoundReport("Faber-Krahn", ld, right, {"domain": domain.to_dict(), "area": A},
                       "A(D) lambda(D) >= lambda(Disk_1)", FK_ALLOWANCE * ld,
                       "equality case (disk)" if eq else "")


def hansen_nadirashvili_check(domain, accuracy=1e-4):
    """``A lambda_1 >= (1 + (1 - r_i/r_0)^2 / 250) lambda(Disk_1)``."""
    ld = eigen.lambda_disk1()
    A = geometry.area(domain)
    ri = geometry.inradius(domain)
    r0 = geometry.equivalent_radius(domain)
    factor = 1 + (1 - ri / r0) ** 2 / 250
    right = A * lambda_domain(domain, accuracy)
    return BoundReport("Hansen-Nadirashvili", factor * ld, right,
                       {"domain": domain.to_dict(), "inradius": ri, "equivalent_radius": r0,
                        "factor": factor},
                       "A lambda >= (1 + (1 - r_i/r_0)^2/250) lambda(Disk_1)", FK_ALLOWANCE * ld)


def bdpv_check(domain, C=1.0, resolution=None, accuracy=1e-4):
    """Quantitative Faber-Krahn with a caller-supplied constant ``C``.

    ``left = C * asym^2 * lambda(Disk_1)``, ``right = A lambda_1 - lambda(Disk_1)``.
    ``inputs["tight_C"]`` is the largest constant for which this domain
    still satisfies the inequality.
    """
    if not C > 0:
        raise ConfigError("C must be positive")
    ld = eigen.lambda_disk1()
    A = geometry.area(domain)
    if resolution is None:
        resolution = math.sqrt(A) / 600
    asym = geometry.fraenkel_asymmetry(domain, resolution)
    right = A * lambda_domain(domain, accuracy) - ld
    left = C * asym ** 2 * ld
    vacuous = asym < 1e-12
    tight = right / (asym ** 2 * ld) if not vacuous else math.inf
    return BoundReport("BDPV", left, right,
                       {"domain": domain.to_dict(), "C": C, "asymmetry": asym, "tight_C": tight},
                       "A lambda - lambda(Disk_1) >= C asym^2 lambda(Disk_1)", FK_ALLOWANCE * ld,
                       "vacuous, 0 >= 0" if vacuous else "")


# ---------------------------------------------------------------------------
# Bourgain


def _bourgain_residual(delta, p):
    return delta ** 3 / 250 - ((1 - delta) / p) ** 2 + 1


def bourgain_delta0(p=BLIND_P):
    """Root of ``delta^3/250 = ((1 - delta)/p)^2 - 1`` in ``(0, 1 - p)``."""
    if not 0 < p < 1:
        raise ConfigError("p must lie in (0, 1)")
    lo, hi = 0.0, 1.0 - p
    flo, fhi = _bourgain_residual(lo, p), _bourgain_residual(hi, p)
    if not (flo < 0 < fhi):
        raise ConfigError("no sign change on the bracket")
    return bisect(_bourgain_residual, lo, hi, args=(p,), xtol=1e-14, maxiter=200)


def bourgain_b(delta, p=BLIND_P):
    """``(1 + 250/delta^3) / (pi/sqrt(12) (1 - delta)^-2 + 250/delta^3)`` on ``(0, delta_0)``."""
    d0 = bourgain_delta0(p)
    if not 0 < delta < d0:
        raise ConfigError(f"delta must lie in (0, {d0:.6g})")
    t = 250 / delta ** 3
    return (1 + t) / (HEX_PACKING / (1 - delta) ** 2 + t)


def bourgain_b_minus_one(delta):
    """``b(delta) - 1`` without cancellation."""
    s = HEX_PACKING / (1 - delta) ** 2
    return (1 - s) / (s + 250 / delta ** 3)


def bourgain_threshold():
    """``b(delta) > 1`` exactly for ``delta < 1 - sqrt(pi/sqrt(12))``."""
    return 1 - math.sqrt(HEX_PACKING)


@dataclass
class BourgainSup:
    sup: float
    argmax: float
    excess: float  # sup - 1, computed without cancellation
    delta0: float


def bourgain_sup(p=BLIND_P, grid=2000):
    """Supremum of ``b`` over ``(0, delta_0)``: dense grid, then bounded scalar refinement."""
    d0 = bourgain_delta0(p)
    ds = np.linspace(0, d0, grid + 1)[1:-1]
    vals = np.array([bourgain_b_minus_one(d) for d in ds])
    i = int(np.argmax(vals))
    lo, hi = ds[max(i - 1, 0)], ds[min(i + 1, len(ds) - 1)]
    res = minimize_scalar(lambda d: -bourgain_b_minus_one(d) * 1e9, bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-13})
    d = float(res.x)
    ex = bourgain_b_minus_one(d)
    if ex < vals[i]:
        d, ex = float(ds[i]), float(vals[i])
    return BourgainSup(1 + ex, d, ex, d0)


def bourgain_reports(p=BLIND_P, lambda_hexa1=None):
    bs = bourgain_sup(p)
    ld = eigen.lambda_disk1()
    lh = lambda_hexa1 or eigen.groundstate_energy(geometry.HEXA1, 1e-5).value
    return [
        BoundReport("Bourgain sup b > 1", 0.0, bs.excess, {"p": p, "argmax": bs.argmax, "delta0": bs.delta0},
                    "sup b(delta) > 1", 0.0),
        BoundReport("Bourgain sup b <= Hexa/Disk", bs.sup, lh / ld, {"p": p},
                    "lambda(Hexa_1)/lambda(Disk_1) >= sup b(delta)", 0.0),
    ]


# ---------------------------------------------------------------------------
# Steinerberger


@dataclass
class SteinerbergerFactor:
    factor: float
    branch: int  # 1: 1 - c/2, 2: 1 - C c^3 / (216 + 6 C c^2)
    implied_bound: float  # lambda(Disk_1) / factor


def steinerberger_factor(c, C=1.0):
    if not 0 < c < 2:
        raise ConfigError("c must lie in (0, 2)")
    if not C > 0:
        raise ConfigError("C must be positive")
    b1 = 1 - c / 2
    b2 = 1 - C * c ** 3 / (216 + 6 * C * c ** 2)
    f = max(b1, b2)
    return SteinerbergerFactor(f, 1 if b1 >= b2 else 2, eigen.lambda_disk1() / f)


def steinerberger_crossing(C=1.0):
    """Point in ``(0, 2)`` where the two branches meet, or ``None``.

    The second branch exceeds ``1 - c/2`` wherever ``c/2 > C c^3/(216 + 6 C c^2)``,
    which holds on all of ``(0, 2)`` for every ``C > 0`` since the right side is
    below ``c/6``; the sign test is still done numerically.
    """
    g = lambda c: (1 - c / 2) - (1 - C * c ** 3 / (216 + 6 * C * c ** 2))  # noqa: E731
    cs = np.linspace(1e-9, 2 - 1e-9, 4001)
    vals = np.array([g(c) for c in cs])
    idx = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
    if len(idx) == 0:
        return None
    return bisect(g, cs[idx[0]], cs[idx[0] + 1], xtol=1e-14)


# ---------------------------------------------------------------------------
# partitions and counting


def uncertainty_principle_audit(partition):
    """Area-weighted sum of ``D(cell) + asym(cell)``; the universal constant is unknown.

    ``D(cell) = 1 - min_j A_j / A(cell)``. The report records the sum as
    ``right`` against ``left = 0``; only its empirical value is of interest.
    """
    mask = partition.mask
    h = mask.h
    xy = mask.coords()
    areas = partition.areas()
    A = areas.sum()
    amin = areas.min()
    total = 0.0
    asyms = []
    for i in range(1, partition.k + 1):
        sel = partition.labels == i
        asym = geometry.pixel_asymmetry(xy[sel, 0], xy[sel, 1], areas[i - 1], h)
        asyms.append(asym)
        total += (1 - amin / areas[i - 1] + asym) * areas[i - 1] / A
    return BoundReport("uncertainty principle (empirical)", 0.0, total,
                       {"k": partition.k, "asymmetries": asyms, "areas": areas.tolist()},
                       "sum (D + asym) A_i / A >= c (c unknown)", 0.0,
                       "constant not asserted; value tracked across runs")


def _bessel_count(radius, lam):
    """Dirichlet eigenvalues of the disk below ``lam`` from Bessel zeros (with multiplicity)."""
    xmax = radius * math.sqrt(lam)
    n = 0
    for m in range(int(math.ceil(xmax)) + 1):  # j_{m,1} > m
        k = 0
        while eigen.bessel_zero(m, k + 1) < xmax:
            k += 1
        n += k * (1 if m == 0 else 2)
    return n


def weyl_check(domain, lam, tolerance=None, h=None):
    """Eigenvalue count below ``lam`` against the Weyl term ``A lam / (4 pi)``.

    Rectangles use exact lattice counting, other domains the grid solver (the
    disk additionally reports the Bessel-zero count). ``left`` is the relative
    gap, ``right`` the tolerance (5% for rectangles, 10% otherwise).
    """
    A = geometry.area(domain)
    weyl = A * lam / (4 * math.pi)
    inputs = {"domain": domain.to_dict(), "lambda": lam, "weyl": weyl}
    if domain.kind == "rectangle":
        a, b = domain.params
        count = rect.counting_function(a, b, lam)
        tol = 0.05 if tolerance is None else tolerance
        inputs["method"] = "lattice"
    else:
        tol = 0.10 if tolerance is None else tolerance
        expected = int(1.3 * weyl) + 10
        if h is None:
            h = math.sqrt(A / max(6000, 60 * expected))
        mask = geometry.rasterize(domain, h)
        op = eigen.assemble_dirichlet_laplacian(mask, boundary="linear")
        j = min(expected, mask.n - 2)
        vals = np.array([p.value for p in eigen.lowest_eigenpairs(op, j)])
        if vals[-1] < lam:
            raise ResolutionError("not enough eigenvalues resolved below lambda")
        count = int((vals < lam).sum())
        inputs.update(method="grid", h=h)
        if domain.kind == "disk":
            inputs["bessel_count"] = _bessel_count(domain.params[0], lam)
        if count:
            k = count
            inputs["weyl_sum"] = float(vals[:k].mean())
            inputs["weyl_sum_leading"] = 2 * math.pi * k / A
    inputs["count"] = count
    notes = ""
    if count < 20:
        notes = "lambda too small for a meaningful Weyl comparison"
    gap = abs(count - weyl) / weyl
    return BoundReport("Weyl", gap, tol, inputs, "N(lambda) ~ A lambda / (4 pi)", 0.0, notes)


def chain_consistency(consts):
    """``2/pi < nu_Hex < nu_Pl < 1`` from computed constants."""
    return consts.polterovich < consts.nu_hex < consts.nu_pl < 1


def standard_reports(accuracy=1e-4, with_weyl=True):
    """The full suite on the built-in domains."""
    consts = pleijel_constants()
    reps = []
    for name, dom in (("Disk1", geometry.DISK1), ("Sq1", geometry.SQ1), ("Hexa1", geometry.HEXA1),
                      ("T1", geometry.T1)):
        for fn in (faber_krahn_check, hansen_nadirashvili_check):
            r = fn(dom, accuracy)
            r.name = f"{r.name} [{name}]"
            reps.append(r)
        r = bdpv_check(dom, 1.0, accuracy=accuracy)
        r.name = f"{r.name} [{name}]"
        reps.append(r)
    reps += bourgain_reports(lambda_hexa1=consts.lambda_hexa1)
    reps.append(BoundReport("chain 2/pi < nu_Hex < nu_Pl < 1", 0.0, 1.0 if chain_consistency(consts) else -1.0,
                            consts.as_dict(), "constants chain"))
    if with_weyl:
        reps.append(weyl_check(geometry.DomainSpec.rectangle(1, 1), 500))
        reps.append(weyl_check(geometry.DomainSpec.disk(1), 200))
    return reps
