"""Twisted 1-cocycles, coboundaries, parabolic potentials and the two pairings.

Conventions (fixed once, used everywhere):
    alpha(uv) = alpha(u) + Ad_{rho(u)} alpha(v)
    (dX)(g)   = Ad_{rho(g)} X - X
so tangent cocycles of representation paths are (d/dt rho_t) rho^-1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IllConditioned, NotClosedSurface, NotParabolic
from .words import (
    IDENTITY,
    GroupRingElement,
    SurfacePresentation,
    TwoChain,
    Word,
    fox_derivative_word,
    fundamental_class,
)
from .reps import Representation, project_traceless


def sl_basis(n: int) -> list[np.ndarray]:
    """Frobenius-orthonormal basis of sl(n,R): off-diagonal units, then
    orthonormalized zero-sum diagonals."""
    basis = []
    for i in range(n):
        for j in range(n):
            if i != j:
                e = np.zeros((n, n))
                e[i, j] = 1.0
                basis.append(e)
    for k in range(1, n):
        d = np.zeros(n)
        d[:k] = 1.0
        d[k] = -k
        d /= np.linalg.norm(d)
        basis.append(np.diag(d))
    return basis


def numeric_rank(m: np.ndarray, rel_tol: float = 1e-8) -> tuple[int, float]:
    """Rank by relative singular-value cut, with the gap across the cut.

    Returns (rank, gap) where gap = s_rank / s_{rank+1} (inf for full rank
    or exact zeros).
    """
    if m.size == 0:
        return 0, np.inf
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0:
        return 0, np.inf
    keep = s > rel_tol * s[0]
    rank = int(keep.sum())
    if rank == len(s) or s[rank] == 0.0:
        return rank, np.inf
    if rank == 0:
        return 0, np.inf
    return rank, float(s[rank - 1] / s[rank])


class Cocycle:
    """Group 1-cocycle with coefficients in sl(n,R) twisted by Ad rho."""

    def __init__(self, base: Representation, values):
        self.base = base
        self.values = [project_traceless(np.asarray(v, dtype=float)) for v in values]
        if len(self.values) != base.presentation.num_generators:
            raise ValueError("one value per generator required")

    def evaluate_word(self, w: Word) -> np.ndarray:
        out = np.zeros((self.base.n, self.base.n))
        p = np.eye(self.base.n)
        pinv = np.eye(self.base.n)
        for l in w.letters:
            if l > 0:
                val = self.values[l - 1]
                out += p @ val @ pinv
                p = p @ self.base.images[l - 1]
                pinv = self.base._inverses[l - 1] @ pinv
            else:
                i = -l - 1
                g, gi = self.base.images[i], self.base._inverses[i]
                out += p @ (-(gi @ self.values[i] @ g)) @ pinv
                p = p @ gi
                pinv = g @ pinv
        return out

    def evaluate(self, a) -> np.ndarray:
        """Evaluate on a word by the extension rule, linearly on ring elements."""
        if isinstance(a, Word):
            return self.evaluate_word(a)
        out = np.zeros((self.base.n, self.base.n))
        for w, c in a.terms.items():
            out += c * self.evaluate_word(w)
        return out

    def relator_residual(self) -> float:
        return float(np.linalg.norm(self.evaluate_word(self.base.presentation.relator)))

    def __add__(self, other: "Cocycle") -> "Cocycle":
        return Cocycle(self.base, [a + b for a, b in zip(self.values, other.values)])

    def __sub__(self, other: "Cocycle") -> "Cocycle":
        return Cocycle(self.base, [a - b for a, b in zip(self.values, other.values)])

    def scale(self, t: float) -> "Cocycle":
        return Cocycle(self.base, [t * v for v in self.values])


def coboundary(rep: Representation, x: np.ndarray) -> Cocycle:
    x = project_traceless(np.asarray(x, dtype=float))
    return Cocycle(rep, [rep.images[i] @ x @ rep._inverses[i] - x
                         for i in range(rep.presentation.num_generators)])


# -- coordinates --------------------------------------------------------------

def cocycle_to_coords(alpha: Cocycle) -> np.ndarray:
    basis = sl_basis(alpha.base.n)
    return np.concatenate([[float(np.tensordot(e, v)) for e in basis] for v in alpha.values])


def cocycle_from_coords(rep: Representation, coords: np.ndarray) -> Cocycle:
    basis = sl_basis(rep.n)
    d = len(basis)
    vals = []
    for i in range(rep.presentation.num_generators):
        c = coords[i * d:(i + 1) * d]
        vals.append(sum(ci * e for ci, e in zip(c, basis)))
    return Cocycle(rep, vals)


def _relator_operator(rep: Representation) -> np.ndarray:
    """Matrix of alpha |-> alpha(R) from generator values to sl(n,R).

    Uses the Fox expansion alpha(R) = sum_i (dR/ds_i) . alpha(s_i) where the
    group ring acts through Ad rho.
    """
    basis = sl_basis(rep.n)
    d = len(basis)
    ngens = rep.presentation.num_generators
    ad = {}

    def ad_of(w: Word) -> np.ndarray:
        if w not in ad:
            g = rep.evaluate(w)
            gi = np.linalg.inv(g)
            ad[w] = np.array([[float(np.tensordot(ei, g @ ej @ gi)) for ej in basis]
                              for ei in basis])
        return ad[w]

    cols = np.zeros((d, ngens * d))
    for i in range(ngens):
        der = fox_derivative_word(rep.presentation.relator, i + 1)
        block = np.zeros((d, d))
        for w, c in der.terms.items():
            block += c * ad_of(w)
        cols[:, i * d:(i + 1) * d] = block
    return cols


def cocycle_space_basis(rep: Representation, rel_tol: float = 1e-8,
                        min_gap: float = 1e3) -> list[Cocycle]:
    """Orthonormal basis of the space Z^1 of cocycles, by SVD nullspace.

    Raises :class:`IllConditioned` when the singular-value gap at the rank
    cut is below ``min_gap``.
    """
    op = _relator_operator(rep)
    u, s, vt = np.linalg.svd(op)
    smax = s[0] if len(s) else 0.0
    ncols = op.shape[1]
    null_mask = np.zeros(ncols, dtype=bool)
    null_mask[len(s):] = True
    if smax > 0:
        null_mask[: len(s)] = s <= rel_tol * smax
    else:
        null_mask[:] = True
    kept = s[~null_mask[: len(s)]]
    dropped = s[null_mask[: len(s)]]
    if len(kept) and len(dropped) and dropped[0] > 0:
        gap = kept[-1] / dropped[0]
        if gap < min_gap:
            raise IllConditioned(f"nullspace gap {gap:.2e} below {min_gap:.1e}")
    return [cocycle_from_coords(rep, vt[i]) for i in range(ncols) if null_mask[i]]


def coboundary_space_basis(rep: Representation) -> list[Cocycle]:
    return [coboundary(rep, e) for e in sl_basis(rep.n)]


# -- parabolic structure -------------------------------------------------------

@dataclass
class ParabolicCertificate:
    """Potentials X_i with (Ad_{rho(z_i)} - 1) X_i = alpha(z_i), plus residuals."""

    potentials: list
    residuals: list

    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0


def _ad_minus_id(rep: Representation, w: Word) -> np.ndarray:
    g = rep.evaluate(w)
    gi = np.linalg.inv(g)
    n = rep.n
    return np.kron(g, gi.T) - np.eye(n * n)


def parabolic_potentials(alpha: Cocycle, peripheral: list[Word],
                         tol: float = 1e-7, strict: bool = True) -> ParabolicCertificate:
    """Minimal-norm least-squares potentials for alpha on each peripheral word.

    With ``strict`` (the default) raises :class:`NotParabolic` as soon as a
    residual exceeds ``tol``.
    """
    rep = alpha.base
    pots, ress = [], []
    for w in peripheral:
        a = _ad_minus_id(rep, w)
        rhs = alpha.evaluate_word(w).reshape(-1)
        x, *_ = np.linalg.lstsq(a, rhs, rcond=None)
        res = float(np.linalg.norm(a @ x - rhs))
        if strict and res > tol:
            raise NotParabolic(f"peripheral residual {res:.3e} exceeds {tol:.1e}")
        pots.append(project_traceless(x.reshape(rep.n, rep.n)))
        ress.append(res)
    return ParabolicCertificate(potentials=pots, residuals=ress)


def solvability_constraint_rows(rep: Representation, w: Word) -> np.ndarray:
    """Projector whose kernel is the solvable set: alpha(w) in image(Ad_{rho(w)} - 1)."""
    a = _ad_minus_id(rep, w)
    proj = np.eye(a.shape[0]) - a @ np.linalg.pinv(a)
    return proj


def parabolic_subspace_basis(rep: Representation, peripheral: list[Word],
                             ambient_basis: list[Cocycle] | None = None,
                             rel_tol: float = 1e-8) -> list[Cocycle]:
    """Basis of the parabolic cocycles: Z^1 cut by solvability on each word."""
    if ambient_basis is None:
        ambient_basis = cocycle_space_basis(rep)
    if not ambient_basis:
        return []
    rows = []
    for w in peripheral:
        proj = solvability_constraint_rows(rep, w)
        vals = np.stack([b.evaluate_word(w).reshape(-1) for b in ambient_basis])
        rows.append(proj @ vals.T)
    m = np.vstack(rows)
    u, s, vt = np.linalg.svd(m)
    k = len(ambient_basis)
    null_mask = np.zeros(k, dtype=bool)
    null_mask[len(s):] = True
    if len(s) and s[0] > 0:
        null_mask[: len(s)] = s <= rel_tol * s[0]
    elif len(s):
        null_mask[:] = True
    out = []
    for idx in range(k):
        if not null_mask[idx]:
            continue
        coeffs = vt[idx]
        vals = [sum(c * b.values[j] for c, b in zip(coeffs, ambient_basis))
                for j in range(rep.presentation.num_generators)]
        out.append(Cocycle(rep, vals))
    return out


# -- pairings ------------------------------------------------------------------

def cup_pairing(alpha: Cocycle, beta: Cocycle, chain: TwoChain) -> float:
    """Chain-level cup pairing  - sum over symbols [a|x] of Tr alpha(bar a) beta(x)."""
    total = 0.0
    beta_cache: dict[Word, np.ndarray] = {}
    for (w, x), c in chain.symbols.items():
        if x not in beta_cache:
            beta_cache[x] = beta.evaluate_word(x)
        total -= c * float(np.tensordot(alpha.evaluate_word(w.inverse()).T, beta_cache[x]))
    return total


def omega_G(alpha: Cocycle, beta: Cocycle) -> float:
    """Atiyah-Bott-Goldman pairing on a closed surface."""
    p = alpha.base.presentation
    if not p.is_closed:
        raise NotClosedSurface("omega_G requires a closed surface presentation")
    return cup_pairing(alpha, beta, fundamental_class(p))


def omega_K(alpha: Cocycle, beta: Cocycle, peripheral: list[Word] | None = None,
            h: Word = IDENTITY, tol: float = 1e-7) -> float:
    """Chain-level pairing with boundary correction (Kim/GHJW form).

    ``peripheral`` defaults to the boundary generators of the base
    presentation; for a closed surface this reduces to ``omega_G``.  The
    optional ``h`` computes against the conjugated relator's chain, which the
    well-definedness tests exercise.
    """
    p = alpha.base.presentation
    if peripheral is None:
        peripheral = list(p.boundary_words())
    value = cup_pairing(alpha, beta, fundamental_class(p, h))
    if peripheral:
        cert = parabolic_potentials(alpha, peripheral, tol=tol)
        for x_i, z in zip(cert.potentials, peripheral):
            value -= float(np.tensordot(x_i.T, beta.evaluate_word(z)))
    return value


def gram_matrix(form, basis: list[Cocycle]) -> np.ndarray:
    k = len(basis)
    g = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            g[i, j] = form(basis[i], basis[j])
    return g


def tangent_cocycle(path, rep: Representation, step: float = 1e-5) -> Cocycle:
    """Central-difference tangent cocycle (d rho_t / dt) rho^-1 of a rep path.

    ``path`` maps a float t to a Representation over the same presentation
    with path(0) = rep.
    """
    plus, minus = path(step), path(-step)
    vals = []
    for i in range(rep.presentation.num_generators):
        dg = (plus.images[i] - minus.images[i]) / (2 * step)
        vals.append(project_traceless(dg @ rep._inverses[i]))
    return Cocycle(rep, vals)
