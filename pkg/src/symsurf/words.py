"""Free-group words, the integral group ring, Fox derivatives and surface classes.

Everything in this module is exact: words are freely reduced tuples of signed
1-based generator indices (``+i`` for the i-th generator, ``-i`` for its
inverse) and group-ring elements carry arbitrary-precision integer
coefficients.  No floating point enters at this layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence


class UnknownGenerator(ValueError):
    """A letter refers to a generator index outside the declared alphabet."""


def _reduce(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for l in letters:
        if l == 0:
            raise UnknownGenerator("letter 0 is not a valid signed generator index")
        if stack and stack[-1] == -l:
            stack.pop()
        else:
            stack.append(l)
    return tuple(stack)


class Word:
    """A freely reduced word in a free group.

    Stored as a flat tuple of nonzero signed indices; the empty tuple is the
    identity.  Instances are immutable and hashable so they can key group-ring
    maps.
    """

    __slots__ = ("letters", "_hash")

    def __init__(self, letters: Iterable[int] = ()):
        object.__setattr__(self, "letters", _reduce(letters))
        object.__setattr__(self, "_hash", hash(self.letters))

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple(-l for l in reversed(self.letters)))

    def is_identity(self) -> bool:
        return not self.letters

    def max_index(self) -> int:
        return max((abs(l) for l in self.letters), default=0)

    def cyclic_reduce(self) -> "Word":
        """Strip matching inverse letters from the two ends."""
        ls = list(self.letters)
        while len(ls) >= 2 and ls[0] == -ls[-1]:
            ls = ls[1:-1]
        return Word(ls)

    def cyclic_rotations(self) -> list["Word"]:
        ls = self.letters
        return [Word(ls[k:] + ls[:k]) for k in range(max(1, len(ls)))]

    def __repr__(self) -> str:
        if not self.letters:
            return "Word(1)"
        return "Word(%s)" % ",".join(str(l) for l in self.letters)


IDENTITY = Word()


def reduce_word(letters: Sequence[int], ngens: int | None = None) -> Word:
    """Freely reduce a raw letter sequence into a :class:`Word`.

    If ``ngens`` is given, every letter must satisfy ``1 <= abs(letter) <= ngens``;
    otherwise any nonzero integer is accepted.
    """
    if ngens is not None:
        for l in letters:
            if not (1 <= abs(l) <= ngens):
                raise UnknownGenerator(f"letter {l} outside alphabet of {ngens} generators")
    return Word(letters)


def generator(i: int) -> Word:
    """The word consisting of the single generator ``s_i`` (1-based)."""
    if i == 0:
        raise UnknownGenerator("generator indices are 1-based and nonzero")
    return Word((i,))


def commutator(u: Word, v: Word) -> Word:
    return u * v * u.inverse() * v.inverse()


class GroupRingElement:
    """An element of the integral group ring ZF of a free group.

    Canonical form: a map Word -> nonzero int.  Supports +, -, * (ring
    multiplication), and scalar multiplication by ints.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, int] | None = None):
        clean: dict[Word, int] = {}
        if terms:
            for w, c in terms.items():
                if c:
                    clean[w] = clean.get(w, 0) + c
                    if not clean[w]:
                        del clean[w]
        self.terms = clean

    @staticmethod
    def zero() -> "GroupRingElement":
        return GroupRingElement()

    @staticmethod
    def one() -> "GroupRingElement":
        return GroupRingElement({IDENTITY: 1})

    @staticmethod
    def from_word(w: Word, coeff: int = 1) -> "GroupRingElement":
        return GroupRingElement({w: coeff})

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupRingElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return GroupRingElement(out)

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        return self + (-other)

    def __mul__(self, other: "GroupRingElement") -> "GroupRingElement":
        out: dict[Word, int] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 * w2
                out[w] = out.get(w, 0) + c1 * c2
        return GroupRingElement(out)

    def scale(self, k: int) -> "GroupRingElement":
        return GroupRingElement({w: k * c for w, c in self.terms.items()})

    def left_mul_word(self, h: Word) -> "GroupRingElement":
        return GroupRingElement({h * w: c for w, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "GR(0)"
        bits = [f"{c}*{w!r}" for w, c in sorted(self.terms.items(), key=lambda t: t[0].letters)]
        return "GR(" + " + ".join(bits) + ")"


def ring_op(a: GroupRingElement, b: GroupRingElement, kind: str) -> GroupRingElement:
    """Ring arithmetic dispatcher: ``kind`` is ``"add"`` or ``"mul"``."""
    if kind == "add":
        return a + b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown ring operation {kind!r}")


def augmentation(a: GroupRingElement) -> int:
    """Sum of coefficients; the ring homomorphism ZF -> Z killing the group."""
    return sum(a.terms.values())


def bar(a: GroupRingElement) -> GroupRingElement:
    """Linear extension of group inversion g -> g^-1 (an anti-automorphism)."""
    return GroupRingElement({w.inverse(): c for w, c in a.terms.items()})


def fox_derivative_word(w: Word, gen: int) -> GroupRingElement:
    """Fox derivative of a single word with respect to generator ``gen``.

    Follows the left product rule d(uv) = u*dv + du*eps(v): for a word
    l_1...l_k the derivative collects a prefix term for every occurrence of
    the generator, positively for ``+gen`` and negatively (including the
    inverse letter itself) for ``-gen``.
    """
    if gen <= 0:
        raise UnknownGenerator("generator indices are 1-based and positive")
    out: dict[Word, int] = {}
    prefix: tuple[int, ...] = ()
    for l in w.letters:
        if l == gen:
            pw = Word(prefix)
            out[pw] = out.get(pw, 0) + 1
        elif l == -gen:
            pw = Word(prefix + (l,))
            out[pw] = out.get(pw, 0) - 1
        prefix = prefix + (l,)
    return GroupRingElement(out)


def fox_derivative(a: GroupRingElement | Word, gen: int) -> GroupRingElement:
    """Fox derivative on the group ring, extended linearly from words."""
    if isinstance(a, Word):
        return fox_derivative_word(a, gen)
    out = GroupRingElement.zero()
    for w, c in a.terms.items():
        out = out + fox_derivative_word(w, gen).scale(c)
    return out


def word_map(w: Word, images: Sequence[Word]) -> Word:
    """Apply the homomorphism s_i -> images[i-1] to a word, freely reducing."""
    letters: list[int] = []
    for l in w.letters:
        img = images[abs(l) - 1]
        letters.extend(img.letters if l > 0 else img.inverse().letters)
    return Word(letters)


def ring_map(a: GroupRingElement, images: Sequence[Word]) -> GroupRingElement:
    out: dict[Word, int] = {}
    for w, c in a.terms.items():
        ww = word_map(w, images)
        out[ww] = out.get(ww, 0) + c
    return GroupRingElement(out)


@dataclass(frozen=True)
class SurfacePresentation:
    """Standard one-relator presentation of a compact surface group.

    Generators are ordered x_1, y_1, ..., x_g, y_g, z_1, ..., z_b and the
    relator is prod [x_i, y_i] * prod z_j.  Hyperbolicity (negative Euler
    characteristic) is required by the numerical layers but not enforced
    here, so that symbolic chains over the torus remain expressible.
    """

    genus: int
    boundary_count: int
    generator_names: tuple[str, ...] = field(init=False)
    relator: Word = field(init=False)

    def __post_init__(self):
        if self.genus < 0 or self.boundary_count < 0:
            raise ValueError("genus and boundary_count must be non-negative")
        names: list[str] = []
        for i in range(self.genus):
            names += [f"x{i + 1}", f"y{i + 1}"]
        names += [f"z{j + 1}" for j in range(self.boundary_count)]
        letters: list[int] = []
        for i in range(self.genus):
            x, y = 2 * i + 1, 2 * i + 2
            letters += [x, y, -x, -y]
        zoff = 2 * self.genus
        letters += [zoff + j + 1 for j in range(self.boundary_count)]
        object.__setattr__(self, "generator_names", tuple(names))
        object.__setattr__(self, "relator", Word(letters))

    @property
    def num_generators(self) -> int:
        return 2 * self.genus + self.boundary_count

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - self.boundary_count

    @property
    def is_hyperbolic(self) -> bool:
        return self.euler_characteristic < 0

    @property
    def is_closed(self) -> bool:
        return self.boundary_count == 0

    def boundary_generator_indices(self) -> tuple[int, ...]:
        return tuple(2 * self.genus + j + 1 for j in range(self.boundary_count))

    def boundary_words(self) -> tuple[Word, ...]:
        return tuple(generator(i) for i in self.boundary_generator_indices())

    def word(self, letters: Sequence[int]) -> Word:
        return reduce_word(letters, self.num_generators)

    def generator_index(self, name: str) -> int:
        return self.generator_names.index(name) + 1


class TwoChain:
    """A formal 2-chain of normalized bar-resolution symbols [a | x].

    The first slot is a group-ring element, linear by convention; the chain
    is stored expanded into (word, word) symbols with integer coefficients.
    Symbols with an identity word in either slot are degenerate in the
    normalized resolution and are dropped.
    """

    __slots__ = ("symbols",)

    def __init__(self, pairs: Iterable[tuple[GroupRingElement, Word]] = ()):
        symbols: dict[tuple[Word, Word], int] = {}
        for a, x in pairs:
            if x.is_identity():
                continue
            for w, c in a.terms.items():
                if w.is_identity():
                    continue
                key = (w, x)
                symbols[key] = symbols.get(key, 0) + c
                if not symbols[key]:
                    del symbols[key]
        self.symbols = symbols

    @staticmethod
    def from_symbols(symbols: Mapping[tuple[Word, Word], int]) -> "TwoChain":
        out = TwoChain()
        out.symbols = {k: c for k, c in symbols.items()
                       if c and not k[0].is_identity() and not k[1].is_identity()}
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, TwoChain) and self.symbols == other.symbols

    def __add__(self, other: "TwoChain") -> "TwoChain":
        out = dict(self.symbols)
        for k, c in other.symbols.items():
            out[k] = out.get(k, 0) + c
        return TwoChain.from_symbols(out)

    def __neg__(self) -> "TwoChain":
        return TwoChain.from_symbols({k: -c for k, c in self.symbols.items()})

    def __sub__(self, other: "TwoChain") -> "TwoChain":
        return self + (-other)

    def left_mul_word(self, h: Word) -> "TwoChain":
        return TwoChain.from_symbols({(h * w, x): c for (w, x), c in self.symbols.items()})

    def map_words(self, images: Sequence[Word]) -> "TwoChain":
        """Push the chain through the homomorphism s_i -> images[i-1]."""
        out: dict[tuple[Word, Word], int] = {}
        for (w, x), c in self.symbols.items():
            key = (word_map(w, images), word_map(x, images))
            out[key] = out.get(key, 0) + c
        return TwoChain.from_symbols(out)

    def terms(self) -> list[tuple[GroupRingElement, Word]]:
        """Group the symbols back into (ring element, word) bracket pairs."""
        by_second: dict[Word, dict[Word, int]] = {}
        for (w, x), c in self.symbols.items():
            by_second.setdefault(x, {})[w] = c
        return [(GroupRingElement(d), x) for x, d in by_second.items()]

    def is_zero(self) -> bool:
        return not self.symbols

    def __repr__(self) -> str:
        return f"TwoChain({len(self.symbols)} symbols)"


def relator_chain(relator: Word, num_generators: int) -> TwoChain:
    """The 2-chain sum_i [dR/ds_i | s_i] of Fox derivatives of a relator."""
    return TwoChain(
        (fox_derivative_word(relator, i), generator(i))
        for i in range(1, num_generators + 1)
    )


def fundamental_class(p: SurfacePresentation, h: Word = IDENTITY) -> TwoChain:
    """(Relative) fundamental 2-chain of a surface presentation.

    With ``h`` the identity this is sum_i [dR/ds_i | s_i] over all generators;
    a nontrivial ``h`` left-multiplies every first slot, matching the chain of
    the conjugated relator h R h^-1.
    """
    base = relator_chain(p.relator, p.num_generators)
    if h.is_identity():
        return base
    return base.left_mul_word(h)
