"""Numerical SL(n,R) representations of surface groups.

Matrices are plain numpy arrays: group elements are unimodular n x n arrays,
Lie-algebra elements are traceless n x n arrays.  ``spectral`` gates purely
loxodromic elements (distinct positive real eigenvalues) and exposes the
eigen-flag data that the pairing, flow and flag-invariant layers consume.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvariantViolation, NotLoxodromic
from .words import (
    GroupRingElement,
    SurfacePresentation,
    Word,
    commutator,
    generator,
)

LOXODROMIC_GAP = 1e-8


def as_group_matrix(entries, tol: float = 1e-9) -> np.ndarray:
    """Validate and return an SL(n,R) matrix (det = 1 within ``tol`` relative)."""
    g = np.asarray(entries, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("group matrix must be square")
    det = np.linalg.det(g)
    if abs(det - 1.0) > tol * max(1.0, abs(det)):
        raise InvariantViolation(f"determinant {det} is not 1 within tolerance")
    return g


def as_lie_element(entries, tol: float = 1e-12) -> np.ndarray:
    """Validate and return an sl(n,R) matrix (trace ~ 0)."""
    x = np.asarray(entries, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError("Lie algebra element must be square")
    scale = max(1.0, float(np.abs(x).max()))
    if abs(np.trace(x)) > tol * scale * x.shape[0]:
        raise InvariantViolation(f"trace {np.trace(x)} is not 0 within tolerance")
    return x


def project_traceless(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    return x - np.trace(x) / n * np.eye(n)


class Representation:
    """Assignment of SL(n,R) matrices to the generators of a surface group."""

    def __init__(self, presentation: SurfacePresentation, images, n: int | None = None,
                 relator_tol: float = 1e-8):
        self.presentation = presentation
        self.images = [np.asarray(m, dtype=float) for m in images]
        if len(self.images) != presentation.num_generators:
            raise ValueError("one image per generator required")
        self.n = n if n is not None else self.images[0].shape[0]
        for m in self.images:
            if m.shape != (self.n, self.n):
                raise ValueError("image has wrong shape")
        self._inverses = [np.linalg.inv(m) for m in self.images]
        res = self.relator_residual()
        if res > relator_tol:
            raise InvariantViolation(f"relator residual {res:.3e} exceeds {relator_tol:.1e}")

    def relator_residual(self) -> float:
        """Residual of rho(R) = 1, scaled by the largest intermediate prefix norm
        so that well-conditioned failures are not masked and benign rounding in
        large-entry products (long bending times) is not flagged."""
        r, scale = self.evaluate_with_scale(self.presentation.relator)
        return float(np.linalg.norm(r - np.eye(self.n)) / (np.sqrt(self.n) * scale))

    def evaluate(self, w: Word) -> np.ndarray:
        """Evaluate a word; the homomorphism property holds by construction."""
        out = np.eye(self.n)
        for l in w.letters:
            out = out @ (self.images[l - 1] if l > 0 else self._inverses[-l - 1])
        return out

    def evaluate_with_scale(self, w: Word) -> tuple[np.ndarray, float]:
        out = np.eye(self.n)
        scale = 1.0
        for l in w.letters:
            out = out @ (self.images[l - 1] if l > 0 else self._inverses[-l - 1])
            scale = max(scale, float(np.abs(out).max()))
        return out, scale

    def adjoint(self, w: Word, x: np.ndarray) -> np.ndarray:
        g = self.evaluate(w)
        return g @ x @ np.linalg.inv(g)

    def restrict(self, sub: SurfacePresentation, inclusion_words) -> "Representation":
        """Pull back along a homomorphism given by images of the sub-generators."""
        return Representation(sub, [self.evaluate(w) for w in inclusion_words], n=self.n)


def ring_action(rep: Representation, a: GroupRingElement, x: np.ndarray) -> np.ndarray:
    """sum_w coeff(w) * Ad_{rho(w)}(x), the group-ring action on the Lie algebra."""
    out = np.zeros((rep.n, rep.n))
    for w, c in a.terms.items():
        out += c * rep.adjoint(w, x)
    return out


@dataclass
class SpectralData:
    """Sorted eigen-data of a purely loxodromic matrix.

    ``flag_basis`` columns are right eigenvectors in decreasing |eigenvalue|
    order; ``dual_basis`` rows are the matching left eigenvectors normalized
    so that dual_basis @ flag_basis = I.
    """

    eigenvalues: np.ndarray
    flag_basis: np.ndarray
    dual_basis: np.ndarray

    def projector(self, j: int) -> np.ndarray:
        """Spectral projector onto the j-th eigenline (0-based)."""
        return np.outer(self.flag_basis[:, j], self.dual_basis[j, :])


def spectral(g: np.ndarray, gap: float = LOXODROMIC_GAP) -> SpectralData:
    """Eigen-decompose ``g``, gating that it is purely loxodromic.

    Raises :class:`NotLoxodromic` if any eigenvalue is non-real, non-positive
    (after a global sign flip allowed only for even n), or if consecutive
    moduli fail the relative gap |l_i|/|l_{i+1}| >= 1 + gap.
    """
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    vals, vecs = np.linalg.eig(g)
    scale = max(1.0, float(np.abs(vals).max()))
    if np.abs(vals.imag).max() > 1e-8 * scale:
        raise NotLoxodromic("complex eigenvalue pair present")
    vals = vals.real.copy()
    vecs = vecs.real.copy()
    if n % 2 == 0 and np.all(vals < 0):
        vals = -vals  # other sign of the PSL lift
    if np.any(vals <= 0):
        raise NotLoxodromic("non-positive real eigenvalue present")
    order = np.argsort(-vals)
    vals = vals[order]
    vecs = vecs[:, order]
    for i in range(n - 1):
        if vals[i] / vals[i + 1] < 1.0 + gap:
            raise NotLoxodromic(
                f"eigenvalue gap {vals[i] / vals[i + 1] - 1.0:.3e} below gate")
    dual = np.linalg.inv(vecs)
    recon = (vecs * vals) @ dual
    if np.linalg.norm(recon - g) > 1e-8 * max(1.0, np.linalg.norm(g)):
        raise NotLoxodromic("eigen-reconstruction residual too large")
    return SpectralData(eigenvalues=vals, flag_basis=vecs, dual_basis=dual)


@dataclass
class LengthInvariants:
    """Log-eigenvalue-ratio invariants of a loxodromic matrix."""

    gaps: np.ndarray           # log(l_i / l_{i+1}), i = 1..n-1
    ell: float | None = None   # log(l_1 / l_n), n = 3 only
    m: float | None = None     # 3 log(l_2),     n = 3 only


def length_invariants(g: np.ndarray) -> LengthInvariants:
    sd = spectral(g)
    logs = np.log(sd.eigenvalues)
    gaps = logs[:-1] - logs[1:]
    if g.shape[0] == 3:
        return LengthInvariants(gaps=gaps, ell=float(logs[0] - logs[2]), m=float(3 * logs[1]))
    return LengthInvariants(gaps=gaps)


def spectral_generators(g: np.ndarray) -> list[np.ndarray]:
    """Ad-invariant gradients F_j = P_j - P_{j+1} of the log-eigenvalue ratios.

    Each F_j commutes with ``g`` and satisfies
    d/dt|_0 [log l_j - log l_{j+1}](g exp(tX)) = Tr(F_j X).
    """
    sd = spectral(g)
    n = g.shape[0]
    projs = [sd.projector(j) for j in range(n)]
    return [projs[j] - projs[j + 1] for j in range(n - 1)]


def twist_direction(g: np.ndarray, coeffs) -> np.ndarray:
    """Linear combination sum_j coeffs[j] * F_j(g) of the spectral generators."""
    fs = spectral_generators(g)
    out = np.zeros_like(fs[0])
    for c, f in zip(coeffs, fs):
        out += c * f
    return out


def symmetric_square(m: np.ndarray) -> np.ndarray:
    """Induced action of a 2x2 matrix on degree-2 symmetric tensors.

    Basis (e1*e1, e1*e2, e2*e2); this is the unique irreducible 3-dimensional
    representation of SL(2,R).
    """
    a, b = m[0, 0], m[0, 1]
    c, d = m[1, 0], m[1, 1]
    return np.array([
        [a * a, a * b, b * b],
        [2 * a * c, a * d + b * c, 2 * b * d],
        [c * c, c * d, d * d],
    ])


def fuchsian_embed(rep2: Representation) -> Representation:
    """Compose an SL(2,R) representation with the irreducible SL2 -> SL3 map."""
    if rep2.n != 2:
        raise ValueError("fuchsian_embed expects an SL(2,R) representation")
    return Representation(rep2.presentation, [symmetric_square(m) for m in rep2.images], n=3)


# ---------------------------------------------------------------------------
# Desk-scale representation constructors.
#
# Pants and one-holed-torus groups are free, so any generator images satisfy
# the relator exactly; the closed genus-2 constructor uses the doubled tuple
# (A, B, B, A), which satisfies [x1,y1][x2,y2] = 1 identically, and then moves
# off the symmetric locus by relator-preserving bending conjugations.
# ---------------------------------------------------------------------------


def _random_sl2_hyperbolic(rng, spread=1.0):
    a = rng.uniform(0.6, 1.4)
    z = rng.normal(size=(2, 2), scale=spread)
    k = scipy.linalg.expm(z - np.trace(z) / 2 * np.eye(2))
    return k @ np.diag([np.exp(a), np.exp(-a)]) @ np.linalg.inv(k)


def _all_loxodromic(mats, gap=1e-3):
    try:
        for m in mats:
            spectral(m, gap=gap)
    except NotLoxodromic:
        return False
    return True


def pants_presentation() -> SurfacePresentation:
    return SurfacePresentation(genus=0, boundary_count=3)


def one_holed_torus_presentation() -> SurfacePresentation:
    return SurfacePresentation(genus=1, boundary_count=1)


def genus2_presentation() -> SurfacePresentation:
    return SurfacePresentation(genus=2, boundary_count=0)


def pants_representation(seed: int = 0, n: int = 3, perturb: float = 0.12) -> Representation:
    """Loxodromic-boundary pants representation, seeded and reproducible.

    Built from the symmetric square of a random SL(2,R) pair, then pushed off
    the Fuchsian locus by free perturbation (the pants group is free, so the
    relator constraint just determines the third boundary image).  Retries
    the draw until all three boundary holonomies pass the loxodromic gate.
    """
    if n != 3:
        raise NotImplementedError("shipped constructors target n = 3")
    rng = np.random.default_rng(seed)
    for _ in range(200):
        a2, b2 = _random_sl2_hyperbolic(rng), _random_sl2_hyperbolic(rng)
        za = rng.normal(size=(3, 3), scale=perturb)
        zb = rng.normal(size=(3, 3), scale=perturb)
        g1 = symmetric_square(a2) @ scipy.linalg.expm(project_traceless(za))
        g2 = symmetric_square(b2) @ scipy.linalg.expm(project_traceless(zb))
        g3 = np.linalg.inv(g1 @ g2)
        if _all_loxodromic([g1, g2, g3]):
            return Representation(pants_presentation(), [g1, g2, g3], n=3)
    raise NotLoxodromic("no loxodromic pants representation found for this seed")


def one_holed_torus_representation(seed: int = 0, perturb: float = 0.1) -> Representation:
    """Free (x, y) images with loxodromic commutator; z is [x,y]^-1."""
    rng = np.random.default_rng(seed)
    for _ in range(200):
        a2, b2 = _random_sl2_hyperbolic(rng), _random_sl2_hyperbolic(rng)
        za = rng.normal(size=(3, 3), scale=perturb)
        zb = rng.normal(size=(3, 3), scale=perturb)
        g1 = symmetric_square(a2) @ scipy.linalg.expm(project_traceless(za))
        g2 = symmetric_square(b2) @ scipy.linalg.expm(project_traceless(zb))
        comm = g1 @ g2 @ np.linalg.inv(g1) @ np.linalg.inv(g2)
        if _all_loxodromic([g1, g2, comm]):
            return Representation(one_holed_torus_presentation(),
                                  [g1, g2, np.linalg.inv(comm)], n=3)
    raise NotLoxodromic("no loxodromic one-holed torus representation for this seed")


def genus2_representation(seed: int = 0, bend: tuple[float, ...] = (0.37, -0.23, 0.29, -0.17)
                          ) -> Representation:
    """Closed genus-2 representation: doubled (A, B, B, A) plus two bendings.

    ``bend`` gives (t1, t2, s1, s2): flow times along the separating curve
    [x1, y1] in the two spectral directions of its holonomy, then along the
    non-separating curve x1.  Both moves preserve the relator identically.
    """
    rng = np.random.default_rng(seed)
    p = genus2_presentation()
    x1w, y1w = generator(1), generator(2)
    sep_word = commutator(x1w, y1w)
    for _ in range(200):
        a2, b2 = _random_sl2_hyperbolic(rng), _random_sl2_hyperbolic(rng)
        a = symmetric_square(a2)
        b = symmetric_square(b2)
        comm = a @ b @ np.linalg.inv(a) @ np.linalg.inv(b)
        if not _all_loxodromic([a, b, comm]):
            continue
        t1, t2, s1, s2 = bend
        # bend along the separating curve: conjugate the (x2, y2) side
        x_sep = twist_direction(comm, (t1, t2))
        e = scipy.linalg.expm(x_sep)
        ei = np.linalg.inv(e)
        images = [a, b, e @ b @ ei, e @ a @ ei]
        # bend along x1 (non-separating): right-multiply the transverse y1
        y_non = twist_direction(a, (s1, s2))
        images[1] = images[1] @ scipy.linalg.expm(y_non)
        try:
            rep = Representation(p, images, n=3)
        except InvariantViolation:
            continue
        sep_h = rep.evaluate(sep_word)
        if _all_loxodromic([images[0], images[2], sep_h]):
            return rep
    raise NotLoxodromic("no suitable genus-2 representation for this seed")
