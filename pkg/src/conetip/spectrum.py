"""Generalized eigensolve of the symbol pencil and the energy-line machinery.

The pencil ``A f = Lambda B f`` has complex symmetric matrices and an
indefinite weight, so the workhorse is a dense QZ solve (no symmetry
shortcuts).  Eigenvalues map to singular exponents through
``Lambda = lambda*(lambda+1)``; eigenvalues with real ``Lambda < -1/4`` sit on
the energy line ``Re(lambda) = -1/2`` and generate propagating (black-hole)
singularities.  This module certifies eigenpairs by residual, detects line
eigenvalues, computes Jordan chains when the sigma-weighted Gram of the
eigenspace degenerates, and derives radial weight exponents from the spectrum
right of the line.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .cap import PencilMatrices
from .errors import (DimensionMismatch, MassMatrixSingular,
                     NotApplicableDissipative)

RESIDUAL_TOL = 1e-8
LINE_TOL = 1e-6
ETA_MIN = 1e-4
JORDAN_THRESHOLD = 1e-10


@dataclass(frozen=True)
class EigenPair:
    Lambda: complex
    vector: np.ndarray
    residual: float


@dataclass(frozen=True)
class SpectrumResult:
    """Residual-certified pencil spectrum, sorted by (Re, Im) of Lambda."""

    pairs: tuple
    mode: int
    pencil: PencilMatrices
    b_condition: float
    n_rejected: int

    @property
    def Lambdas(self) -> np.ndarray:
        return np.array([p.Lambda for p in self.pairs])

    @property
    def lambda_view(self) -> np.ndarray:
        """Per eigenvalue, the exponent pair ``(-1/2 + s, -1/2 - s)`` with
        ``s = sqrt(Lambda + 1/4)`` (principal branch)."""
        return np.array([lambda_from_Lambda(p.Lambda) for p in self.pairs])


def lambda_from_Lambda(Lambda: complex):
    """Both roots of ``lambda*(lambda+1) = Lambda``; their sum is exactly -1."""
    s = np.sqrt(complex(Lambda) + 0.25)
    return (-0.5 + s, -0.5 - s)


def solve_pencil(P: PencilMatrices, residual_tol: float = RESIDUAL_TOL,
                 method: str = "qz") -> SpectrumResult:
    """Solve ``A v = Lambda B v`` densely.

    ``method="qz"`` never inverts B.  ``method="invert"`` runs a plain dense
    eigensolve of ``B^{-1} A`` and refuses when the condition estimate of B
    exceeds 1e12 (the estimate is reported either way).
    """
    A, B = np.asarray(P.A), np.asarray(P.B)
    b_cond = float(np.linalg.cond(B))
    if method == "invert":
        if b_cond > 1e12:
            raise MassMatrixSingular(f"cond(B) ~ {b_cond:.3e}")
        w, vr = np.linalg.eig(np.linalg.solve(B, A))
    elif method == "qz":
        w, vr = scipy.linalg.eig(A, B)
    else:
        raise DimensionMismatch(f"unknown method {method!r}")
    vr = vr.astype(complex)
    norm_a = np.linalg.norm(A, 2)
    norm_b = np.linalg.norm(B, 2)
    m1 = P.mass_one

    pairs = []
    n_rejected = 0
    for lam, v in zip(w, vr.T):
        if not np.isfinite(lam):
            n_rejected += 1
            continue
        v = v / np.sqrt(np.real(np.conj(v) @ (m1 @ v)))
        k = int(np.argmax(np.abs(v)))
        v = v * (np.conj(v[k]) / abs(v[k]))
        if abs(v[k].imag) < 1e-13 * abs(v[k].real):
            v = v + 0j
            v.imag[k] = 0.0
        res = np.linalg.norm(A @ v - lam * (B @ v)) / (norm_a + abs(lam) * norm_b)
        if res < residual_tol:
            v.setflags(write=False)
            pairs.append(EigenPair(Lambda=complex(lam), vector=v, residual=float(res)))
        else:
            n_rejected += 1
    pairs.sort(key=lambda p: (p.Lambda.real, p.Lambda.imag))
    return SpectrumResult(pairs=tuple(pairs), mode=P.cap.mode if P.cap else -1,
                          pencil=P, b_condition=b_cond, n_rejected=n_rejected)


@dataclass(frozen=True)
class LineEigenvalue:
    """A (clustered) pencil eigenvalue on the energy line.

    ``eta > 0`` with ``lambda = -1/2 + i*eta`` and ``Lambda = -1/4 - eta**2``.
    ``eigenvectors`` span the discrete kernel, orthonormalized in the
    weight-one inner product; ``gram`` is the bilinear sigma-weighted Gram
    ``G[i, j] = phi_i^T B phi_j`` whose degeneracy signals Jordan chains.
    ``chains[k]`` lists the generalized vectors above ``eigenvectors[k]``
    (empty tuple when the eigenvalue is non-defective).
    """

    eta: float
    Lambda: float
    mode: int
    eigenvectors: tuple
    gram: np.ndarray
    pencil: PencilMatrices
    chains: tuple = ()
    near_quarter: bool = False
    jordan_ambiguous: bool = False

    @property
    def multiplicity(self) -> int:
        return len(self.eigenvectors)

    @property
    def lam(self) -> complex:
        return complex(-0.5, self.eta)


def _one_orthonormalize(vectors, m1):
    """Gram-Schmidt in the sesquilinear weight-one inner product."""
    out = []
    for v in vectors:
        v = np.array(v, dtype=complex)
        for u in out:
            v = v - (np.conj(u) @ (m1 @ v)) * u
        n = np.sqrt(np.real(np.conj(v) @ (m1 @ v)))
        v /= n
        k = int(np.argmax(np.abs(v)))
        v *= np.conj(v[k]) / abs(v[k])
        out.append(v)
    return out


def _bilinear_gram(vectors, B):
    n = len(vectors)
    G = np.empty((n, n), dtype=complex)
    for i, vi in enumerate(vectors):
        Bvi = B @ vi
        for j, vj in enumerate(vectors):
            G[i, j] = vj @ Bvi
    return G


def line_eigenvalues(spec: SpectrumResult, tol: float = LINE_TOL,
                     eta_min: float = ETA_MIN) -> list:
    """Extract eigenvalues on the energy line.

    An eigenvalue qualifies when ``|Im Lambda| <= tol * max(1, |Re Lambda|)``
    and ``Re Lambda < -1/4``.  Discrete eigenvalues closer than the same
    relative tolerance are clustered into one LineEigenvalue whose geometric
    multiplicity is the cluster size.  Clusters with ``eta < eta_min`` are
    returned flagged ``near_quarter`` (the double root ``lambda = -1/2`` is
    special-cased out of basis construction downstream).
    """
    cands = [p for p in spec.pairs
             if abs(p.Lambda.imag) <= tol * max(1.0, abs(p.Lambda.real))
             and p.Lambda.real < -0.25]
    cands.sort(key=lambda p: p.Lambda.real)
    clusters = []
    for p in cands:
        if clusters and abs(p.Lambda.real - clusters[-1][-1].Lambda.real) \
                <= tol * max(1.0, abs(p.Lambda.real)):
            clusters[-1].append(p)
        else:
            clusters.append([p])
    out = []
    m1 = spec.pencil.mass_one
    for cl in clusters:
        lam_mean = float(np.mean([p.Lambda.real for p in cl]))
        eta = float(np.sqrt(max(-lam_mean - 0.25, 0.0)))
        vecs = _one_orthonormalize([p.vector for p in cl], m1)
        G = _bilinear_gram(vecs, spec.pencil.B)
        out.append(LineEigenvalue(
            eta=eta, Lambda=lam_mean, mode=spec.mode,
            eigenvectors=tuple(vecs), gram=G, pencil=spec.pencil,
            chains=tuple(() for _ in vecs), near_quarter=eta < eta_min))
    out.sort(key=lambda le: le.eta)
    return out


def _gram_scale(le: LineEigenvalue, svals: np.ndarray) -> float:
    # natural magnitude of sigma-grams of weight-one-normalized vectors;
    # keeps the threshold meaningful for geometric multiplicity one
    P = le.pencil
    floor = np.linalg.norm(P.B, 2) / np.linalg.norm(P.mass_one, 2)
    return float(max(svals[0] if len(svals) else 0.0, floor))


def jordan_indicator(le: LineEigenvalue) -> float:
    """Smallest singular value of the sigma-Gram over its scale; values below
    the Jordan threshold signal generalized eigenvectors."""
    svals = np.linalg.svd(le.gram, compute_uv=False)
    return float(svals[-1] / _gram_scale(le, svals))


def jordan_chains(P: PencilMatrices, le: LineEigenvalue,
                  threshold: float = JORDAN_THRESHOLD, max_chain: int = 4,
                  chain_tol: float = RESIDUAL_TOL) -> LineEigenvalue:
    """Populate Jordan chains of a line eigenvalue.

    The chain equation above a root ``phi_0`` is
    ``(A - Lambda B) phi_1 = 2i eta B phi_0`` (and
    ``(A - Lambda B) phi_{k+1} = 2i eta B phi_k + B phi_{k-1}`` further up),
    solvable exactly when the sigma-Gram of the eigenspace is singular.  Roots
    are taken along the Gram's near-null singular directions and the chain is
    extended while the least-squares residual certifies solvability.
    """
    if le.pencil is not P:
        raise DimensionMismatch("line eigenvalue does not belong to this pencil")
    U, svals, Vh = np.linalg.svd(le.gram)
    scale = _gram_scale(le, svals)
    ambiguous = threshold / 10 < svals[-1] / scale < threshold * 10
    if svals[-1] >= threshold * scale:
        return replace(le, chains=tuple(() for _ in le.eigenvectors),
                       jordan_ambiguous=ambiguous)

    M = P.A - le.Lambda * P.B
    two_i_eta = 2j * le.eta
    basis = np.array(le.eigenvectors).T
    new_vectors, new_chains = [], []
    null_mask = svals < threshold * scale
    # defective roots first (null directions of the Gram), then the rest
    order = list(np.where(null_mask)[0]) + list(np.where(~null_mask)[0])
    for j in order:
        w = Vh[j].conj()
        phi0 = basis @ w
        new_vectors.append(phi0)
        if not null_mask[j]:
            new_chains.append(())
            continue
        chain = []
        prev2, prev1 = None, phi0
        while len(chain) < max_chain - 1:
            rhs = two_i_eta * (P.B @ prev1)
            if prev2 is not None:
                rhs = rhs + P.B @ prev2
            x, *_ = np.linalg.lstsq(M, rhs, rcond=None)
            res = np.linalg.norm(M @ x - rhs) / np.linalg.norm(P.B @ prev1)
            if res > chain_tol:
                break
            chain.append(x)
            prev2, prev1 = prev1, x
        new_chains.append(tuple(chain))
    return replace(le, eigenvectors=tuple(new_vectors), chains=tuple(new_chains),
                   jordan_ambiguous=ambiguous)


@dataclass(frozen=True)
class SpectralWeights:
    """Radial weight exponent: distance from the energy line to the nearest
    spectrum strictly right of it (the Neumann variant is capped at 5/2)."""

    beta: float
    bc_kind: str
    nearest_lambda: complex | None


def spectral_weights(specs, bc_kind: str, line_tol: float = LINE_TOL) -> SpectralWeights:
    """Weight exponent from a collection of per-mode spectra.

    Both exponent roots of every eigenvalue are considered; eigenvalues within
    ``line_tol`` of the line are excluded so the weight measures off-line
    spectrum only.
    """
    if bc_kind not in ("dirichlet", "neumann"):
        raise DimensionMismatch(f"unknown bc kind {bc_kind!r}")
    best, best_lam = np.inf, None
    n_total = 0
    for spec in specs:
        for lp, lm in spec.lambda_view:
            for lam in (lp, lm):
                n_total += 1
                d = lam.real + 0.5
                if d > line_tol and d < best:
                    best, best_lam = d, lam
    if n_total == 0:
        raise DimensionMismatch("empty spectrum")
    if bc_kind == "neumann":
        if best > 2.5:
            best, best_lam = 2.5, None
    elif not np.isfinite(best):
        raise DimensionMismatch("no spectrum right of the line")
    return SpectralWeights(beta=float(best), bc_kind=bc_kind, nearest_lambda=best_lam)


def weight_star(dirichlet: SpectralWeights, neumann: SpectralWeights):
    """Combined exponent ``min(beta_D, beta_N, 1/2)`` with its inputs."""
    star = min(dirichlet.beta, neumann.beta, 0.5)
    return star, {"beta_D": dirichlet.beta, "beta_N": neumann.beta, "cap": 0.5}


def conjugate_pairing_check(spec: SpectrumResult) -> float:
    """Hausdorff distance between the eigenvalue multiset and its conjugate;
    meaningful only for undamped (real) pencils."""
    if spec.pencil.delta != 0:
        raise NotApplicableDissipative("pencil carries dissipation")
    lam = spec.Lambdas
    if len(lam) == 0:
        return 0.0
    d = np.abs(lam[:, None] - np.conj(lam)[None, :])
    return float(d.min(axis=1).max())
