"""Deliberately naive re-implementation of the chain pairing, used as an oracle.

Everything here is written from the definitions with its own recursion and no
reuse of the main evaluation code paths: matrices of words by recursive
splitting, cocycle extension by the defining rule on a split, and the pairing
as a plain double loop over expanded chain symbols.  Keep this file boring.
"""

from __future__ import annotations

import numpy as np

from .words import TwoChain, Word


def _matrix_of_word(w: Word, images, inverses) -> np.ndarray:
    n = images[0].shape[0] if images else 1
    if len(w.letters) == 0:
        return np.eye(n)
    if len(w.letters) == 1:
        l = w.letters[0]
        return images[l - 1] if l > 0 else inverses[-l - 1]
    mid = len(w.letters) // 2
    left = Word(w.letters[:mid])
    right = Word(w.letters[mid:])
    return _matrix_of_word(left, images, inverses) @ _matrix_of_word(right, images, inverses)


def _cocycle_of_word(w: Word, values, images, inverses) -> np.ndarray:
    n = images[0].shape[0] if images else 1
    if len(w.letters) == 0:
        return np.zeros((n, n))
    if len(w.letters) == 1:
        l = w.letters[0]
        if l > 0:
            return values[l - 1]
        g = images[-l - 1]
        gi = inverses[-l - 1]
        return -gi @ values[-l - 1] @ g
    mid = len(w.letters) // 2
    left = Word(w.letters[:mid])
    right = Word(w.letters[mid:])
    gl = _matrix_of_word(left, images, inverses)
    return (_cocycle_of_word(left, values, images, inverses)
            + gl @ _cocycle_of_word(right, values, images, inverses) @ np.linalg.inv(gl))


def cup_pairing_dense(images, alpha_values, beta_values, chain: TwoChain) -> float:
    """- sum over symbols [w|x] of coeff * Tr( alpha(w^-1) beta(x) ), term by term."""
    images = [np.asarray(m, dtype=float) for m in images]
    inverses = [np.linalg.inv(m) for m in images]
    total = 0.0
    for (w, x), coeff in chain.symbols.items():
        aw = _cocycle_of_word(w.inverse(), alpha_values, images, inverses)
        bx = _cocycle_of_word(x, beta_values, images, inverses)
        total -= coeff * float(np.trace(aw @ bx))
    return total
