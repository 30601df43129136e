"""Dissipative eigenvalue trajectories and the absorption selection.

Adding ``i*delta`` to the whole coefficient moves every line eigenvalue off
the energy line; exactly one exponent of each conjugate pair
``lambda = -1/2 +/- i*eta`` gains a positive distance to the line and thereby
becomes admissible in the energy space as ``delta -> 0+``.  Tracking the
eigenvector through a descending delta grid (and, independently, a first-order
perturbation formula) identifies that branch; comparing the selected
subspaces with the flux-outgoing basis gives a consistency verdict that is
reported, never hard-asserted, since the two selections are known to agree
only outside a discrete set of contrasts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .cap import DiscreteCap, PencilMatrices, assemble_dissipative_pencil, assemble_pencil
from .errors import DimensionMismatch, PerturbationDegenerate, TrajectoryLost
from .flux import MandelstamBasis
from .spectrum import ETA_MIN, LineEigenvalue, solve_pencil

OVERLAP_MIN = 0.9
SLOPE_AMBIGUOUS = 1e-10

PLUS_BRANCH = "plus"
MINUS_BRANCH = "minus"
AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class TrajectoryPoint:
    delta: float
    Lambda: complex
    lam: complex
    vector: np.ndarray
    overlap: float


def trajectory(cap: DiscreteCap, le: LineEigenvalue, delta_grid,
               branch: str = PLUS_BRANCH, eigen_index: int = 0) -> list:
    """Continue one eigenpair through a descending dissipation grid.

    At each delta the eigenpair of ``A0 + i delta A1 - Lambda (B0 + i delta B1)``
    with the largest weight-one overlap against the previous vector is taken;
    the exponent branch is continued by proximity (never re-picked from the
    principal root, which would jump across the line).  Overlap below 0.9
    aborts with ``trajectory-lost``.
    """
    deltas = list(delta_grid)
    if any(d <= 0 for d in deltas) or any(np.diff(deltas) >= 0):
        raise DimensionMismatch("delta grid must be positive and descending")
    base = assemble_pencil(cap)
    m1 = base.mass_one
    v_prev = np.asarray(le.eigenvectors[eigen_index], dtype=complex)
    lam_prev = complex(-0.5, le.eta if branch == PLUS_BRANCH else -le.eta)
    points = [TrajectoryPoint(delta=0.0, Lambda=complex(le.Lambda),
                              lam=lam_prev, vector=v_prev, overlap=1.0)]
    for d in deltas:
        spec = solve_pencil(assemble_dissipative_pencil(cap, d))
        best, best_ov = None, -1.0
        for p in spec.pairs:
            ov = abs(np.conj(v_prev) @ (m1 @ p.vector))
            if ov > best_ov:
                best, best_ov = p, ov
        if best is None or best_ov < OVERLAP_MIN:
            raise TrajectoryLost(f"max overlap {best_ov:.3f} at delta={d:g}")
        root = np.sqrt(best.Lambda + 0.25)
        cands = (-0.5 + root, -0.5 - root)
        lam = min(cands, key=lambda c: abs(c - lam_prev))
        points.append(TrajectoryPoint(delta=float(d), Lambda=best.Lambda,
                                      lam=complex(lam), vector=best.vector,
                                      overlap=float(best_ov)))
        v_prev, lam_prev = best.vector, lam
    return points


def perturbation_slope(P0: PencilMatrices, P1_parts, le: LineEigenvalue):
    """First-order eigenvalue motion under ``sigma + i*delta``.

    For a simple line eigenvalue,
    ``dLambda/ddelta = i phi^T (A1 - Lambda B1) phi / (phi^T B0 phi)`` and
    ``dlambda/ddelta = dLambda / (2 lambda + 1)`` per branch; a cluster is
    handled by diagonalizing the projected perturbation against the projected
    weight.  Returns ``(dLambda, dlambda_plus, dlambda_minus, direction)``
    per splitting direction.
    """
    A1, B1 = P1_parts
    if le.eta <= ETA_MIN:
        raise PerturbationDegenerate("eta at the double-root guard")
    Phi = np.array(le.eigenvectors).T
    M = Phi.T @ ((A1 - le.Lambda * B1) @ Phi)
    G = Phi.T @ (P0.B @ Phi)
    if le.multiplicity == 1:
        if abs(G[0, 0]) < 1e-12 * max(1.0, abs(M[0, 0])):
            raise PerturbationDegenerate("sigma-Gram vanishes (Jordan-adjacent)")
        d_Lams = np.array([1j * M[0, 0] / G[0, 0]])
        dirs = np.eye(1, dtype=complex)
    else:
        if np.linalg.cond(G) > 1e10:
            raise PerturbationDegenerate("projected weight is singular")
        vals, dirs = scipy.linalg.eig(1j * M, G)
        order = np.argsort(vals.imag)
        d_Lams, dirs = vals[order], dirs[:, order]
    lam_p = complex(-0.5, le.eta)
    lam_m = complex(-0.5, -le.eta)
    return [(complex(dL), complex(dL / (2 * lam_p + 1)), complex(dL / (2 * lam_m + 1)),
             Phi @ w) for dL, w in zip(d_Lams, dirs.T)]


@dataclass(frozen=True)
class AbsorptionSelection:
    """Which exponent branch each conjugate pair selects under dissipation.

    ``choices`` maps ``(mode, eta, direction_index)`` to ``"plus"``,
    ``"minus"`` or ``"ambiguous"``; the selected branch is the one whose
    exponent moves to the admissible side ``Re(lambda) > -1/2``.
    """

    choices: dict
    slopes: dict

    def branch(self, mode: int, eta: float, k: int = 0) -> str:
        return self.choices[(mode, eta, k)]


def select_outgoing_by_absorption(line_evs, slope_fn=None) -> AbsorptionSelection:
    """Per-pair branch selection from the perturbation slopes.

    ``line_evs`` is an iterable of line eigenvalues (each carrying its
    pencil); ``slope_fn(le) -> [dlambda_plus, ...]`` may be supplied to select
    from finite-difference trajectory slopes instead of the analytic formula.
    Exactly one branch of each pair has ``Re(dlambda/ddelta) > 0`` unless the
    slope's real part falls inside the ambiguity band, which is flagged
    instead of forced.
    """
    choices, slopes = {}, {}
    for le in line_evs:
        if slope_fn is not None:
            branch_slopes = list(slope_fn(le))
        else:
            P0 = le.pencil
            branch_slopes = [dlp for (_, dlp, _, _) in perturbation_slope(
                P0, (P0.stiffness_one, P0.mass_one), le)]
        for k, dlp in enumerate(branch_slopes):
            key = (le.mode, le.eta, k)
            scale = max(abs(dlp), 1.0)
            if dlp.real > SLOPE_AMBIGUOUS * scale:
                choices[key] = PLUS_BRANCH
            elif dlp.real < -SLOPE_AMBIGUOUS * scale:
                choices[key] = MINUS_BRANCH
            else:
                choices[key] = AMBIGUOUS
            slopes[key] = dlp
    return AbsorptionSelection(choices=choices, slopes=slopes)


def finite_difference_slope(points) -> complex:
    """Trajectory-based slope ``(lambda(delta_min) - lambda(0)) / delta_min``."""
    if len(points) < 2 or points[0].delta != 0.0:
        raise DimensionMismatch("need the undamped point first")
    last = points[-1]
    return (last.lam - points[0].lam) / last.delta


@dataclass(frozen=True)
class ConsistencyVerdict:
    """Comparison of the absorption-selected subspace with the flux-outgoing
    one, per (mode, eta): principal angles and an overall agreement flag.
    Report only; disagreement is a finding, not a failure."""

    agree: bool
    details: dict


def consistency_report(basis: MandelstamBasis, selection: AbsorptionSelection,
                       line_evs, angle_tol: float = 1e-6) -> ConsistencyVerdict:
    """Principal angles between span(outgoing) and the absorption-selected
    span within each (mode, eta) block of the singular space."""
    space = basis.flux.basis_ref
    details = {}
    agree = True
    for le in line_evs:
        key = (le.mode, le.eta)
        idx = [i for i, m in enumerate(space.members)
               if m.mode == le.mode and m.eta == le.eta]
        if not idx:
            raise DimensionMismatch("line eigenvalue not represented in the space")
        plus_block = basis.plus_coords[idx, :]
        plus_block = plus_block[:, np.abs(plus_block).sum(axis=0) > 0]

        sel_cols = []
        for k in range(le.multiplicity):
            choice = selection.choices.get((le.mode, le.eta, k))
            if choice is None:
                continue
            _, _, _, direction = perturbation_slope(
                le.pencil, (le.pencil.stiffness_one, le.pencil.mass_one), le)[k]
            w = np.linalg.lstsq(np.array(le.eigenvectors).T, direction, rcond=None)[0]
            col = np.zeros((len(idx),), dtype=complex)
            for j, member_i in enumerate(idx):
                m = space.members[member_i]
                _, eigen_index, level = m.indices
                if level:
                    continue
                if not m.conjugated and choice == PLUS_BRANCH:
                    col[j] = w[eigen_index]
                elif m.conjugated and choice == MINUS_BRANCH:
                    col[j] = np.conj(w[eigen_index])
            if np.any(col):
                sel_cols.append(col)
        if not sel_cols:
            details[key] = {"angles": (), "note": "no unambiguous selection"}
            agree = False
            continue
        S = np.array(sel_cols).T
        angles = scipy.linalg.subspace_angles(plus_block, S)
        details[key] = {"angles": tuple(float(a) for a in angles)}
        if angles.size and angles.max() > angle_tol:
            agree = False
    return ConsistencyVerdict(agree=agree, details=details)
