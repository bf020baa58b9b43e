"""Double-precision polynomial root finding (Aberth-Ehrlich simultaneous iteration)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from ..errors import RootConvergenceError, UsageError
from .poly import Poly


@dataclass(frozen=True)
class ComplexRoot:
    value: complex
    residual: float          # |poly(z)| / sum_k |a_k| |z|^k
    multiplicity: int = 1

    @property
    def modulus(self) -> float:
        return abs(self.value)


def _float_coeffs(poly: Poly) -> np.ndarray:
    """Coefficients as floats, rescaled by a power of two so nothing overflows."""
    cs = poly.coeffs
    big = max(abs(c) for c in cs if c)
    shift = math.floor(math.log2(big.numerator) - math.log2(big.denominator))
    scale = Fraction(2) ** shift
    return np.array([float(c / scale) for c in cs], dtype=float)


def _horner(a: np.ndarray, z: np.ndarray):
    """Values of the polynomial (coefficients low->high) and of its derivative."""
    p = np.full(z.shape, a[-1], dtype=z.dtype)
    dp = np.zeros(z.shape, dtype=z.dtype)
    for c in a[-2::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def scaled_residual(a: np.ndarray, z: np.ndarray) -> np.ndarray:
    zz = z.astype(np.clongdouble)
    aa = a.astype(np.longdouble)
    p, _ = _horner(aa, zz)
    s, _ = _horner(np.abs(aa), np.abs(zz).astype(np.longdouble))
    return (np.abs(p) / s).astype(float)


def _initial_guesses(a: np.ndarray) -> np.ndarray:
    """Bini's initialization: radii from the upper convex hull of (k, log|a_k|)."""
    n = len(a) - 1
    with np.errstate(divide="ignore"):
        la = np.where(a != 0, np.log(np.abs(a)), -np.inf)
    pts = [k for k in range(n + 1) if np.isfinite(la[k])]
    hull: list[int] = []
    for k in pts:
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            # drop j if it lies on or below the segment i -> k
            if (la[j] - la[i]) * (k - i) <= (la[k] - la[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    guesses = []
    for i, j in zip(hull, hull[1:]):
        cnt = j - i
        r = math.exp((la[i] - la[j]) / cnt)
        for t in range(cnt):
            ang = 2 * math.pi * t / cnt + 2 * math.pi * i / n + 0.4
            guesses.append(r * complex(math.cos(ang), math.sin(ang)))
    return np.array(guesses, dtype=complex)


def aberth(a: np.ndarray, tol: float = 1e-12, maxiter: int = 1000):
    """Roots of the polynomial with float coefficients ``a`` (low->high, a[0] != 0).

    Returns (roots, residuals). Iteration stops per-root once the scaled
    residual is below ``tol`` or the Newton correction stops changing the root.
    """
    n = len(a) - 1
    if n == 1:
        z = np.array([-a[0] / a[1]], dtype=complex)
        return z, scaled_residual(a, z)
    z = _initial_guesses(a)
    active = np.ones(n, dtype=bool)
    eps = np.finfo(float).eps
    for _ in range(maxiter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        zi = z[idx]
        p, dp = _horner(a, zi)
        diff = zi[:, None] - z[None, :]
        diff[np.arange(idx.size), idx] = 1.0
        inv = 1.0 / diff
        inv[np.arange(idx.size), idx] = 0.0
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            w = ratio / (1.0 - ratio * s)
        w = np.where(p == 0, 0.0, w)
        bad = ~np.isfinite(w)
        w[bad] = 1e-3 * (1 + np.abs(zi[bad]))
        z[idx] = zi - w
        res = scaled_residual(a, z[idx])
        small_step = np.abs(w) <= 4 * eps * np.abs(z[idx])
        done = (res < tol * 1e-3) | small_step
        active[idx[done]] = False
    res = scaled_residual(a, z)
    return z, res


def polish(poly: Poly, starts, dps: int = 60, maxiter: int = 200) -> list[ComplexRoot]:
    """Aberth iteration in ``dps``-digit arithmetic on the exact coefficients.

    Double-precision coefficients of a high-degree factor can move clustered
    roots far more than the scaled residual suggests; this stage removes
    that error. Residuals are reported relative to sum_k |a_k| |z|^k.
    """
    with mpmath.workdps(dps):
        a = [mpmath.mpf(c.numerator) / c.denominator for c in poly.coeffs]
        z = [mpmath.mpc(complex(s)) for s in starts]
        n = len(z)
        eps = mpmath.mpf(10) ** (-(dps * 3) // 4)

        def ev(x):
            p = a[-1]
            dp = mpmath.mpc(0)
            for c in a[-2::-1]:
                dp = dp * x + p
                p = p * x + c
            return p, dp

        for _ in range(maxiter):
            worst = mpmath.mpf(0)
            for i in range(n):
                p, dp = ev(z[i])
                if p == 0:
                    continue
                ratio = p / dp
                s = mpmath.fsum(1 / (z[i] - z[j]) for j in range(n) if j != i)
                w = ratio / (1 - ratio * s)
                z[i] -= w
                worst = max(worst, abs(w) / max(abs(z[i]), 1))
            if worst < eps:
                break
        out = []
        for x in z:
            p, _ = ev(x)
            scale = mpmath.fsum(abs(c) * abs(x) ** k for k, c in enumerate(a))
            out.append(ComplexRoot(complex(x), float(abs(p) / scale)))
    return out


def poly_roots(poly: Poly, tol: float = 1e-12, maxiter: int = 1000,
               precise: bool = False, dps: int = 60) -> list[ComplexRoot]:
    """All complex roots with multiplicity (multiple roots appear repeatedly).

    With ``precise`` the double-precision roots are refined by ``polish``.
    """
    if poly.degree < 1:
        raise UsageError("poly_roots needs degree >= 1")
    low = poly.mindeg()
    out = [ComplexRoot(0j, 0.0) for _ in range(low)]
    rest = Poly(poly.coeffs[low:])
    if rest.degree >= 1:
        a = _float_coeffs(rest)
        z, res = aberth(a, tol=tol, maxiter=maxiter)
        if precise:
            roots = polish(rest, z, dps=dps)
        else:
            roots = [ComplexRoot(complex(v), float(r)) for v, r in zip(z, res)]
        failed = [r for r in roots if not r.residual < tol]
        out.extend(roots)
        if failed:
            raise RootConvergenceError(
                f"{len(failed)} of {len(roots)} roots above residual tolerance {tol}",
                roots=out, unconverged=failed)
    out.sort(key=lambda r: (abs(r.value), r.value.imag))
    return out


def poly_from_roots(roots) -> np.ndarray:
    """Monic coefficients (low->high) of prod (x - r)."""
    c = np.array([1.0 + 0j])
    for r in roots:
        v = r.value if isinstance(r, ComplexRoot) else r
        c = np.concatenate([[0], c]) - v * np.concatenate([c, [0]])
    return c
