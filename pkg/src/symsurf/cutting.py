"""Cut systems on the genus-2 surface, bending flows, and decomposition checks.

Three cut topologies are shipped, each over the closed genus-2 presentation
<x1, y1, x2, y2 | [x1,y1][x2,y2]>:

* ``separating-genus2``     one separating curve, two one-holed-torus pieces
* ``nonseparating-genus2``  one non-separating curve, one genus-1 two-boundary piece
* ``pants-genus2``          three curves, two pairs of pants

Each system carries hand-derived inclusion words and an exact bar-resolution
chain identity:  fundamental class of the ambient surface equals the sum of
the pushed-in piece chains plus an explicit correction chain, as multisets of
free words.  The identity is checkable symbolically (``chain_identity_defect``)
before any floating point enters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InvariantViolation, SymsurfError
from .words import (
    SurfacePresentation,
    TwoChain,
    Word,
    commutator,
    fundamental_class,
    generator,
    relator_chain,
)
from .reps import (
    Representation,
    length_invariants,
    project_traceless,
    spectral_generators,
)
from .cohomology import (
    Cocycle,
    coboundary,
    numeric_rank,
    omega_K,
    sl_basis,
    tangent_cocycle,
)

# Sign convention relating the bending pairing to the moment-map derivative,
# resolved empirically once (see the moment_check report): with the cocycle
# and chain conventions of this package,  omega(delta(F_j), beta) equals
# MOMENT_SIGN * d/dt f_j(rho_t(xi)).
MOMENT_SIGN = -1.0


@dataclass
class CutCurve:
    name: str
    word: Word                       # holonomy word of the curve in ambient letters
    transverse: Word | None          # xi-perp for a non-tree edge, else None
    bend_rules: tuple[str, ...]      # per ambient generator: fix | conj | right


@dataclass
class CutSystem:
    kind: str
    ambient: SurfacePresentation
    pieces: list[SurfacePresentation]
    inclusion_words: list[list[Word]]   # per piece, per piece generator
    piece_chains: list[TwoChain]        # pushed-in piece fundamental chains
    chain_correction: TwoChain          # ambient class minus the piece chains
    cuts: list[CutCurve]
    boundary_cut_indices: list[list[int]] = field(default_factory=list)

    def cut_words(self) -> list[Word]:
        return [c.word for c in self.cuts]

    def inclusion(self, piece: int, gen_index: int) -> Word:
        return self.inclusion_words[piece][gen_index - 1]


def _w(*letters: int) -> Word:
    return Word(letters)


def _torus_cut_correction() -> TwoChain:
    """Correction chain for cutting <x,y,z | [x,y]z> along the x-curve.

    In the piece-of-torus letters (x=1, y=2):
        -[x | y x^-1 y^-1] - [x y x^-1 | x] + [x | y] - [[x,y] | y]
    """
    return TwoChain.from_symbols({
        (_w(1), _w(2, -1, -2)): -1,
        (_w(1, 2, -1), _w(1)): -1,
        (_w(1), _w(2)): 1,
        (_w(1, 2, -1, -2), _w(2)): -1,
    })


def build_cut_system(kind: str) -> CutSystem:
    """Construct one of the three shipped genus-2 cut systems."""
    ambient = SurfacePresentation(genus=2, boundary_count=0)
    a1, b1, a2, b2 = generator(1), generator(2), generator(3), generator(4)
    p1 = commutator(a1, b1)          # [x1, y1]
    p1i = p1.inverse()

    if kind == "separating-genus2":
        torus = SurfacePresentation(genus=1, boundary_count=1)
        inc1 = [a1, b1, p1i]
        inc2 = [a2, b2, p1]
        chain1 = relator_chain(torus.relator, 3).map_words(inc1)
        # piece 2 enters through the rotated relator z[x,y] = h R h^-1, h = z
        rot = _w(3) * torus.relator * _w(-3)
        chain2 = relator_chain(rot, 3).map_words(inc2)
        correction = TwoChain.from_symbols({(p1, p1i): -1})
        cuts = [CutCurve("xi1", p1i, None, ("fix", "fix", "conj", "conj"))]
        return CutSystem(kind, ambient, [torus, torus], [inc1, inc2],
                         [chain1, chain2], correction, cuts,
                         boundary_cut_indices=[[0], [0]])

    if kind == "nonseparating-genus2":
        piece = SurfacePresentation(genus=1, boundary_count=2)
        # piece letters: x=1, y=2, z1=3 (cut+ side), z2=4 (cut- side)
        inc = [a2, b2, a1, _w(2, -1, -2)]
        rot = _w(3, 4) * piece.relator * _w(-4, -3)
        chain = relator_chain(rot, 4).map_words(inc)
        correction = TwoChain.from_symbols({
            (_w(1), _w(2, -1, -2)): -1,
            (_w(1, 2, -1), _w(1)): -1,
            (_w(1), _w(2)): 1,
            (_w(1, 2, -1, -2), _w(2)): -1,
        })
        cuts = [CutCurve("xi1", a1, b1, ("fix", "right", "fix", "fix"))]
        return CutSystem(kind, ambient, [piece], [inc], [chain], correction, cuts,
                         boundary_cut_indices=[[0, 0]])

    if kind == "pants-genus2":
        pants = SurfacePresentation(genus=0, boundary_count=3)
        inc1 = [a1, _w(2, -1, -2), p1i]
        inc2 = [a2, _w(4, -3, -4), p1]
        chain1 = relator_chain(pants.relator, 3).map_words(inc1)
        # piece 2 inherits the rotation of its torus host: relator c3 c1 c2
        rot2 = _w(3) * pants.relator * _w(-3)
        chain2 = relator_chain(rot2, 3).map_words(inc2)
        corr = TwoChain.from_symbols({(p1, p1i): -1})            # separating step
        corr = corr + _torus_cut_correction().map_words([a1, b1, p1i])
        corr = corr + _torus_cut_correction().map_words([a2, b2, p1]).left_mul_word(p1)
        cuts = [
            CutCurve("xi1", p1i, None, ("fix", "fix", "conj", "conj")),
            CutCurve("xi2", a1, b1, ("fix", "right", "fix", "fix")),
            CutCurve("xi3", a2, b2, ("fix", "fix", "fix", "right")),
        ]
        return CutSystem(kind, ambient, [pants, pants], [inc1, inc2],
                         [chain1, chain2], corr, cuts,
                         boundary_cut_indices=[[1, 1, 0], [2, 2, 0]])

    raise SymsurfError(f"unsupported cut system kind {kind!r}")


CUT_SYSTEM_KINDS = ("separating-genus2", "nonseparating-genus2", "pants-genus2")


def chain_identity_defect(cs: CutSystem) -> TwoChain:
    """Ambient fundamental chain minus pushed piece chains and correction.

    Zero (as exact free-word symbol multisets) for all shipped systems.
    """
    total = fundamental_class(cs.ambient)
    for chain in cs.piece_chains:
        total = total - chain
    return total - cs.chain_correction


def inclusion_defects(cs: CutSystem) -> list[Word]:
    """Image of each piece relator, freely and cyclically reduced.

    Each entry must be the identity or a cyclic rotation of the ambient
    relator (or its inverse): the piece relator maps to a relation.
    """
    out = []
    for piece, words in zip(cs.pieces, cs.inclusion_words):
        img = Word(sum((
            (words[abs(l) - 1].letters if l > 0 else words[abs(l) - 1].inverse().letters)
            for l in piece.relator.letters), ()))
        out.append(img.cyclic_reduce())
    return out


def is_relator_conjugate(w: Word, relator: Word) -> bool:
    wc = w.cyclic_reduce()
    if wc.is_identity():
        return True
    return wc in relator.cyclic_rotations() or wc in relator.inverse().cyclic_rotations()


# -- restriction ----------------------------------------------------------------

def restrict_representation(rep: Representation, cs: CutSystem, piece: int) -> Representation:
    return rep.restrict(cs.pieces[piece], cs.inclusion_words[piece])


def restrict_cocycle(alpha: Cocycle, cs: CutSystem, piece: int,
                     base: Representation | None = None) -> Cocycle:
    """Pull a cocycle back to a piece: value on g is alpha(inclusion word of g)."""
    if base is None:
        base = restrict_representation(alpha.base, cs, piece)
    vals = [alpha.evaluate_word(w) for w in cs.inclusion_words[piece]]
    return Cocycle(base, vals)


def normalize_on_piece(alpha: Cocycle, cs: CutSystem, piece: int):
    """Shift alpha by a coboundary so that it vanishes on one piece.

    Solves the stacked least-squares system (Ad_{rho(w_g)} - 1) X = alpha(w_g)
    over the piece's inclusion words and returns (alpha - dX, max residual).
    Small residual certifies that the restriction was a coboundary.
    """
    rep = alpha.base
    n = rep.n
    rows, rhs = [], []
    for w in cs.inclusion_words[piece]:
        g = rep.evaluate(w)
        gi = np.linalg.inv(g)
        rows.append(np.kron(g, gi.T) - np.eye(n * n))
        rhs.append(alpha.evaluate_word(w).reshape(-1))
    a = np.vstack(rows)
    b = np.concatenate(rhs)
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    res = float(np.linalg.norm(a @ x - b))
    shifted = alpha - coboundary(rep, project_traceless(x.reshape(n, n)))
    return shifted, res


# -- bending flows ---------------------------------------------------------------

@dataclass
class BendingParameter:
    cut_index: int
    direction: np.ndarray     # Ad-invariant along the cut holonomy
    time: float


def check_bending_direction(rep: Representation, cs: CutSystem, bp: BendingParameter,
                            tol: float = 1e-8) -> None:
    cut = cs.cuts[bp.cut_index]
    g = rep.evaluate(cut.word)
    x = bp.direction
    dev = np.linalg.norm(g @ x @ np.linalg.inv(g) - x)
    if dev > tol * max(1.0, np.linalg.norm(x)):
        raise InvariantViolation(f"bending direction not Ad-invariant: {dev:.3e}")


def bending_flow(rep: Representation, cs: CutSystem, bp: BendingParameter) -> Representation:
    """Algebraic bending along a cut curve; preserves the relator identically."""
    check_bending_direction(rep, cs, bp)
    cut = cs.cuts[bp.cut_index]
    e = scipy.linalg.expm(bp.time * bp.direction)
    ei = np.linalg.inv(e)
    images = []
    for idx, rule in enumerate(cut.bend_rules):
        m = rep.images[idx]
        if rule == "fix":
            images.append(m)
        elif rule == "conj":
            images.append(e @ m @ ei)
        elif rule == "right":
            images.append(m @ e)
        else:
            raise SymsurfError(f"unknown bend rule {rule!r}")
    return Representation(rep.presentation, images, n=rep.n)


def bending_tangent(rep: Representation, cs: CutSystem, cut_index: int,
                    direction: np.ndarray) -> Cocycle:
    """Exact tangent cocycle of the bending flow at t = 0."""
    cut = cs.cuts[cut_index]
    x = direction
    vals = []
    for idx, rule in enumerate(cut.bend_rules):
        if rule == "fix":
            vals.append(np.zeros((rep.n, rep.n)))
        elif rule == "conj":
            vals.append(x - rep.images[idx] @ x @ rep._inverses[idx])
        elif rule == "right":
            vals.append(rep.images[idx] @ x @ rep._inverses[idx])
        else:
            raise SymsurfError(f"unknown bend rule {rule!r}")
    return Cocycle(rep, vals)


# -- verification reports ---------------------------------------------------------

@dataclass
class DecompositionReport:
    kind: str
    lhs: float
    rhs_terms: list[float]
    defect: float


def verify_decomposition(rep: Representation, alpha: Cocycle, beta: Cocycle,
                         cs: CutSystem, tol: float = 1e-7) -> DecompositionReport:
    """Compare the ambient pairing with the sum of intrinsic piece pairings."""
    lhs = omega_K(alpha, beta, tol=tol)
    rhs = []
    for i in range(len(cs.pieces)):
        base = restrict_representation(rep, cs, i)
        ra = restrict_cocycle(alpha, cs, i, base=base)
        rb = restrict_cocycle(beta, cs, i, base=base)
        rhs.append(omega_K(ra, rb, tol=tol))
    return DecompositionReport(kind=cs.kind, lhs=lhs, rhs_terms=rhs,
                               defect=abs(lhs - sum(rhs)))


@dataclass
class MomentReport:
    pairing: float
    derivative: float
    defect: float
    halving_ratio: float
    sign: float


def _curve_gap(rep_t: Representation, word: Word, j: int) -> float:
    g = rep_t.evaluate(word)
    return float(length_invariants(g).gaps[j])


def moment_check(rep: Representation, cs: CutSystem, cut_index: int, j: int,
                 path, step: float = 1e-4, cocycle_step: float = 1e-5,
                 ratio_step: float = 4e-3) -> MomentReport:
    """Hamiltonian property of the twist flow: pairing vs. moment derivative.

    ``path`` maps t to a Representation with path(0) = rep.  The pairing is
    the ambient form of the exact bending tangent against the path tangent;
    the derivative is a central difference of f_j = log(l_j / l_{j+1}) of the
    cut holonomy along the path, with a step-halving convergence ratio
    (approximately 4 for a second-order stencil).
    """
    from .cohomology import tangent_cocycle

    cut = cs.cuts[cut_index]
    f_j = spectral_generators(rep.evaluate(cut.word))[j]
    delta = bending_tangent(rep, cs, cut_index, f_j)
    beta = tangent_cocycle(path, rep, step=cocycle_step)
    pairing = omega_K(delta, beta)

    def deriv(h: float) -> float:
        return (_curve_gap(path(h), cut.word, j) - _curve_gap(path(-h), cut.word, j)) / (2 * h)

    derivative = deriv(step)
    d1, d2, d3 = deriv(2 * ratio_step), deriv(ratio_step), deriv(ratio_step / 2)
    num, den = d1 - d2, d2 - d3
    halving_ratio = num / den if abs(den) > 0 else float("inf")
    defect = abs(pairing - MOMENT_SIGN * derivative)
    return MomentReport(pairing=pairing, derivative=derivative, defect=defect,
                        halving_ratio=halving_ratio, sign=MOMENT_SIGN)


@dataclass
class ConservationReport:
    max_drift: float
    additivity_defect: float


def conservation_report(rep: Representation, cs: CutSystem, cut_index: int, j: int,
                        times=(-5.0, -2.0, 1.0, 3.0, 5.0)) -> ConservationReport:
    """Drift of all cut-curve length invariants along a twist flow, and the
    one-parameter group law Phi^t Phi^s = Phi^{t+s}."""
    cut = cs.cuts[cut_index]
    x = spectral_generators(rep.evaluate(cut.word))[j]
    words = [c.word for c in cs.cuts] + list(cs.ambient.boundary_words())
    base = [length_invariants(rep.evaluate(w)) for w in words]
    drift = 0.0
    for t in times:
        bent = bending_flow(rep, cs, BendingParameter(cut_index, x, t))
        for w, b in zip(words, base):
            li = length_invariants(bent.evaluate(w))
            drift = max(drift, float(np.max(np.abs(li.gaps - b.gaps))))
            if li.ell is not None:
                drift = max(drift, abs(li.ell - b.ell), abs(li.m - b.m))
    s, t = 1.3, 2.1
    once = bending_flow(rep, cs, BendingParameter(cut_index, x, s + t))
    twice = bending_flow(bending_flow(rep, cs, BendingParameter(cut_index, x, s)),
                         cs, BendingParameter(cut_index, x, t))
    add = max(
        float(np.linalg.norm(a - b) / max(1.0, np.linalg.norm(a)))
        for a, b in zip(once.images, twice.images)
    )
    return ConservationReport(max_drift=drift, additivity_defect=add)


# -- Mayer-Vietoris desk-scale dimensions ----------------------------------------

@dataclass
class ExactnessReport:
    dim_parabolic: int
    dim_coboundary: int
    dim_kernel: int
    image_dims: list[int]
    min_gap: float


def exactness_report(rep: Representation, cs: CutSystem,
                     parabolic_basis: list[Cocycle],
                     rel_tol: float = 1e-8) -> ExactnessReport:
    """Numeric ranks for the restriction sequence on parabolic cocycles.

    dim_kernel counts classes (cocycles whose restriction to every piece is a
    piece coboundary) modulo ambient coboundaries; image_dims count each
    piece restriction modulo piece coboundaries.
    """
    gaps = []
    k = len(parabolic_basis)
    piece_rows = []
    image_dims = []
    for i in range(len(cs.pieces)):
        base = restrict_representation(rep, cs, i)
        cob = np.stack([np.concatenate([v.reshape(-1) for v in coboundary(base, e).values])
                        for e in sl_basis(rep.n)])
        proj = np.eye(cob.shape[1]) - cob.T @ np.linalg.pinv(cob.T)
        vals = np.stack([
            np.concatenate([restrict_cocycle(b, cs, i, base=base).values[g].reshape(-1)
                            for g in range(cs.pieces[i].num_generators)])
            for b in parabolic_basis])
        reduced = vals @ proj.T
        r, gap = numeric_rank(reduced, rel_tol)
        image_dims.append(r)
        gaps.append(gap)
        piece_rows.append(reduced.T)
    stacked = np.vstack(piece_rows)          # kernel: restricts to coboundaries everywhere
    r_all, gap_all = numeric_rank(stacked, rel_tol)
    gaps.append(gap_all)
    dim_w = k - r_all
    amb_cob = np.stack([
        np.concatenate([v.reshape(-1) for v in coboundary(rep, e).values])
        for e in sl_basis(rep.n)])
    r_cob, gap_cob = numeric_rank(amb_cob, rel_tol)
    gaps.append(gap_cob)
    return ExactnessReport(
        dim_parabolic=k,
        dim_coboundary=r_cob,
        dim_kernel=dim_w - r_cob,
        image_dims=image_dims,
        min_gap=float(min(gaps)),
    )
