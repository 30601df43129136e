"""Critical contrast intervals: hypergeometric closed form and empirical scan.

For an internal circular tip of aperture ``alpha`` the set of contrasts whose
symbol pencil carries energy-line eigenvalues is an interval with one endpoint
at -1; the other endpoint is ``-aleph(alpha)`` with

    aleph(a) = F(1/2,1/2;1;c2) F(3/2,3/2;2;s2) / ( F(1/2,1/2;1;s2) F(3/2,3/2;2;c2) )

where ``c2 = cos(a/2)^2``, ``s2 = sin(a/2)^2`` and F is Gauss's hypergeometric
series.  ``aleph`` satisfies ``aleph(a) * aleph(pi - a) = 1`` and equals 1 at
the half-aperture ``pi/2``.  The scanner detects the same interval from the
discretized pencils and refines the endpoint by bisection, reporting which
azimuthal mode attains it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cap import CapGeometry, MaterialSpec, build_cap, assemble_pencil
from .errors import (CriticalContrastExcluded, InvalidGeometry, NoTransitionFound,
                     SeriesDomain, SeriesNonconvergent)
from .spectrum import line_eigenvalues, solve_pencil

SERIES_Z_MAX = 0.99
SERIES_REL_TOL = 1e-16
SERIES_MAX_TERMS = 10 ** 6
ALEPH_ALPHA_GUARD = 0.2
DEFAULT_MODES = (0, 1, 2, 3, 4)
CONTRAST_NEIGHBORHOOD_GUARD = 0.02


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric series, summed until the next term falls below
    1e-16 of the partial sum.  Restricted to ``|z| <= 0.99`` where the plain
    series converges geometrically; no transformation formulas."""
    if abs(z) > SERIES_Z_MAX:
        raise SeriesDomain(f"|z|={abs(z)} > {SERIES_Z_MAX}")
    if c <= 0 and c == int(c):
        raise SeriesDomain(f"c={c} is a nonpositive integer")
    total = 1.0
    term = 1.0
    for n in range(SERIES_MAX_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (1.0 + n)) * z
        total += term
        if abs(term) <= SERIES_REL_TOL * abs(total):
            return total
    raise SeriesNonconvergent(f"series did not converge at z={z}")


def aleph(alpha: float) -> float:
    """Closed-form critical endpoint magnitude for aperture ``alpha``.

    Guarded away from 0 and pi so both series arguments stay within the
    series domain.  The half-angle arguments are formed from ``cos(alpha)``,
    which makes the symmetric cancellation at ``alpha = pi/2`` exact.
    """
    if not ALEPH_ALPHA_GUARD <= alpha <= np.pi - ALEPH_ALPHA_GUARD:
        raise InvalidGeometry(
            f"alpha={alpha} outside [{ALEPH_ALPHA_GUARD}, pi-{ALEPH_ALPHA_GUARD}]")
    c2 = (1.0 + np.cos(alpha)) / 2.0
    s2 = (1.0 - np.cos(alpha)) / 2.0
    num = hyp2f1(0.5, 0.5, 1.0, c2) * hyp2f1(1.5, 1.5, 2.0, s2)
    den = hyp2f1(0.5, 0.5, 1.0, s2) * hyp2f1(1.5, 1.5, 2.0, c2)
    return num / den


def has_blackhole(geometry: CapGeometry, kappa: float, modes=DEFAULT_MODES,
                  elements: int = 64, order: int = 2, line_tol: float = 1e-6,
                  stop_at_first: bool = False):
    """Whether any azimuthal mode carries an energy-line eigenvalue at this
    contrast.  Returns ``(flag, witnesses)`` with witnesses ``(mode, eta)``;
    ``stop_at_first`` short-circuits after the first witnessing mode (the
    flag is unaffected, the witness list is then partial)."""
    if kappa >= 0:
        raise CriticalContrastExcluded("contrast must be negative")
    material = MaterialSpec.from_contrast(kappa)
    witnesses = []
    for m in modes:
        P = assemble_pencil(build_cap(geometry, material, m, elements, order))
        for le in line_eigenvalues(solve_pencil(P), tol=line_tol):
            witnesses.append((m, le.eta))
        if witnesses and stop_at_first:
            break
    return len(witnesses) > 0, witnesses


@dataclass(frozen=True)
class CriticalInterval:
    """Scanned critical interval with closed-form comparison.

    ``endpoint_inner`` is the detected edge on the -1 side (clamped to the
    scan range when the interval extends past it), ``endpoint_outer`` the
    bisected transition away from -1.  ``per_mode`` maps each mode to the
    eta witnesses observed at the innermost scanned critical point, and
    ``attaining_mode`` is the mode still critical nearest the outer endpoint
    (reported as a finding, not asserted).
    """

    alpha: float
    endpoint_inner: float
    endpoint_outer: float
    closed_form: float
    per_mode: dict
    attaining_mode: int
    grid: tuple
    flags: tuple
    bisect_tol: float


def scan_interval(geometry: CapGeometry, kappa_range=(-0.9, -0.05),
                  grid: int = 24, bisect_tol: float = 1e-3,
                  modes=DEFAULT_MODES, elements: int = 64, order: int = 2,
                  map_fn=map) -> CriticalInterval:
    """Grid scan of :func:`has_blackhole` over a contrast range, with the
    transition refined by bisection.

    The range must stay clear of the excluded contrast -1 (guard 0.02).
    Non-monotone detection patterns (isolated holes at grid resolution) are
    reported in ``flags`` rather than asserted away.  ``map_fn`` lets callers
    evaluate the independent grid points concurrently; the merge is ordered,
    so the result does not depend on the mapper.
    """
    lo, hi = sorted(kappa_range)
    if lo >= 0 or hi >= 0:
        raise CriticalContrastExcluded("range must be negative")
    if min(abs(lo + 1.0), abs(hi + 1.0)) < CONTRAST_NEIGHBORHOOD_GUARD \
            or (lo < -1.0 < hi):
        raise CriticalContrastExcluded(
            f"range must avoid the {CONTRAST_NEIGHBORHOOD_GUARD} neighborhood of -1")
    kappas = np.linspace(lo, hi, grid)
    point = lambda k: (float(k), *has_blackhole(geometry, k, modes, elements,
                                                order, stop_at_first=True))
    results = list(map_fn(point, kappas))
    inside = [r for r in results if r[1]]
    if not inside or all(r[1] for r in results):
        raise NoTransitionFound("no criticality transition inside the range")

    flags = []
    flags_pattern = "".join("1" if r[1] else "0" for r in results)
    if "01" in flags_pattern and "10" in flags_pattern:
        flags.append(f"non-monotone detection pattern {flags_pattern}")

    # the -1 side: innermost critical point (toward -1), clamp at range edge
    minus_one_side = min if abs(lo + 1.0) < abs(hi + 1.0) else max
    inner_kappa = minus_one_side(r[0] for r in inside)
    outer_kappa = (max if minus_one_side is min else min)(r[0] for r in inside)

    # bisect between the outermost critical point and its first non-critical
    # neighbor
    step = (hi - lo) / (grid - 1)
    direction = 1.0 if minus_one_side is min else -1.0
    a, b = outer_kappa, outer_kappa + direction * step
    while abs(b - a) > bisect_tol:
        mid = 0.5 * (a + b)
        flag, _ = has_blackhole(geometry, mid, modes, elements, order,
                                stop_at_first=True)
        if flag:
            a = mid
        else:
            b = mid
    endpoint_outer = 0.5 * (a + b)

    # full witness censuses at the innermost critical point and at the last
    # critical point of the bisection
    per_mode = {}
    _, inner_wit = has_blackhole(geometry, inner_kappa, modes, elements, order)
    for m in modes:
        per_mode[m] = sorted(eta for (mm, eta) in inner_wit if mm == m)
    flag, wit = has_blackhole(geometry, a, modes, elements, order)
    attaining = min((m for (m, _) in wit), default=-1)

    if geometry.kind == "internal":
        closed = -aleph(geometry.alpha)
    else:
        # no closed form for caps touching the boundary
        closed = float("nan")
        flags.append("closed form available for internal tips only")
    return CriticalInterval(alpha=geometry.alpha,
                            endpoint_inner=float(inner_kappa),
                            endpoint_outer=float(endpoint_outer),
                            closed_form=float(closed),
                            per_mode=per_mode, attaining_mode=attaining,
                            grid=tuple(kappas.tolist()), flags=tuple(flags),
                            bisect_tol=bisect_tol)
