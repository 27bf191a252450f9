"""
Exact arithmetic in the Artin braid group B_n.

A braid word is a tuple of nonzero integers: ``k`` stands for the generator
sigma_k and ``-k`` for its inverse (1 <= k <= n-1). Words are read left to
right, the leftmost letter acting first, so that a product of factors is a
literal concatenation.

Two independent equality oracles are provided:

* the left Garside normal form Delta^d x_1 ... x_r, with canonical factors
  stored as permutations (``pos[k]`` is the strand sitting at position k);
* the Artin action on the free group F_n, which is faithful.

``burau_eval`` gives a fast probabilistic check through the unreduced Burau
representation over a prime field.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import AmbientMismatchError, InvalidParameterError

MERSENNE_61 = (1 << 61) - 1


@dataclass(frozen=True)
class BraidWord:
    strand_count: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.strand_count < 1:
            raise InvalidParameterError("strand_count must be positive")
        object.__setattr__(self, "letters", tuple(self.letters))
        n = self.strand_count
        for x in self.letters:
            if x == 0 or abs(x) >= n:
                raise InvalidParameterError(f"generator {x} out of range for B_{n}")

    @classmethod
    def identity(cls, n: int) -> "BraidWord":
        return cls(n, ())

    @classmethod
    def sigma(cls, n: int, k: int, power: int = 1) -> "BraidWord":
        sign = 1 if power > 0 else -1
        return cls(n, (sign * k,) * abs(power))

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return compose([self, other])

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strand_count, tuple(-x for x in reversed(self.letters)))

    def __pow__(self, k: int) -> "BraidWord":
        if k < 0:
            return self.inverse() ** (-k)
        return BraidWord(self.strand_count, free_reduce(self.letters * k))

    def is_identity_word(self) -> bool:
        return not self.letters

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(f"s{x}" if x > 0 else f"s{-x}^-1" for x in self.letters)


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    """Cancel adjacent inverse pairs."""
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _check_ambient(words: Sequence[BraidWord]) -> int:
    if not words:
        raise InvalidParameterError("need at least one braid")
    n = words[0].strand_count
    for w in words[1:]:
        if w.strand_count != n:
            raise AmbientMismatchError(f"B_{n} vs B_{w.strand_count}")
    return n


def compose(words: Sequence[BraidWord]) -> BraidWord:
    n = _check_ambient(words)
    out: list[int] = []
    for w in words:
        for x in w.letters:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return BraidWord(n, tuple(out))


def conjugate(g: BraidWord, h: BraidWord) -> BraidWord:
    """g^h = h^-1 g h, returned verbatim (no free reduction)."""
    n = _check_ambient([g, h])
    hinv = h.inverse()
    return BraidWord(n, hinv.letters + g.letters + h.letters)


def exponent_sum(w: BraidWord) -> int:
    return sum(1 if x > 0 else -1 for x in w.letters)


def permutation(w: BraidWord) -> tuple[int, ...]:
    """Final position (1-based) of the strand starting at each position."""
    n = w.strand_count
    pos = list(range(n))  # pos[k]: strand at position k
    for x in w.letters:
        i = abs(x) - 1
        pos[i], pos[i + 1] = pos[i + 1], pos[i]
    final = [0] * n
    for k, s in enumerate(pos):
        final[s] = k + 1
    return tuple(final)


def compose_permutations(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """Permutation of uv from those of u and v (same convention as ``permutation``)."""
    return tuple(q[p[s] - 1] for s in range(len(p)))


def full_twist(n: int) -> BraidWord:
    """(sigma_1 ... sigma_{n-1})^n, the generator of the centre of B_n."""
    if n < 1:
        raise InvalidParameterError("n must be positive")
    return BraidWord(n, tuple(range(1, n)) * n)


def half_twist(n: int) -> BraidWord:
    """Garside element Delta of B_n as a positive word."""
    letters: list[int] = []
    for top in range(n - 1, 0, -1):
        letters.extend(range(1, top + 1))
    return BraidWord(n, tuple(letters))


# ---------------------------------------------------------------------------
# Garside normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GarsideNormalForm:
    strand_count: int
    delta_power: int
    canonical_factors: tuple[tuple[int, ...], ...]

    def is_identity(self) -> bool:
        return self.delta_power == 0 and not self.canonical_factors

    def to_word(self) -> BraidWord:
        n = self.strand_count
        delta = half_twist(n)
        letters = list((delta ** self.delta_power).letters)
        for f in self.canonical_factors:
            letters.extend(simple_to_letters(f))
        return BraidWord(n, free_reduce(letters))


def simple_to_letters(pos: Sequence[int]) -> list[int]:
    """A positive word for the permutation braid ``pos`` (bubble sort)."""
    arr = list(range(len(pos)))
    target = list(pos)
    letters = []
    # build target from identity by adjacent swaps that create inversions only
    for k in range(len(target)):
        j = arr.index(target[k], k)
        while j > k:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            letters.append(j)  # sigma_j swaps positions j-1, j (0-based)
            j -= 1
    return letters


class _NFBuilder:
    """Incremental left-greedy normal form, multiplied on the right.

    Factors are stored in a frame twisted by tau^flip, tau(x) = Delta^-1 x Delta,
    so that a trailing Delta^-1 costs O(1).
    """

    def __init__(self, n: int):
        self.n = n
        self.power = 0
        self.flip = 0
        self.factors: list[list[int]] = []
        self.inverses: list[list[int]] = []

    def _frame(self, i: int) -> int:
        """Generator index (0-based) i in the stored frame."""
        return self.n - 2 - i if self.flip else i

    def mul_generator(self, i0: int) -> None:
        i = self._frame(i0)
        if self.factors:
            a = self.factors[-1]
            if a[i] < a[i + 1]:
                ai = self.inverses[-1]
                a[i], a[i + 1] = a[i + 1], a[i]
                ai[a[i]], ai[a[i + 1]] = i, i + 1
                self._sweep(len(self.factors) - 2)
                return
        f = list(range(self.n))
        f[i], f[i + 1] = f[i + 1], f[i]
        self.factors.append(f)
        self.inverses.append(list(f))
        self._sweep(len(self.factors) - 2)

    def mul_inverse_generator(self, i0: int) -> None:
        # x s^-1 = x Delta^-1 (Delta s^-1) and x Delta^-1 = Delta^-1 tau(x)
        self.power -= 1
        self.flip ^= 1
        i = self._frame(i0)
        n = self.n
        f = list(range(n - 1, -1, -1))
        f[i], f[i + 1] = f[i + 1], f[i]
        inv = [0] * n
        for k, s in enumerate(f):
            inv[s] = k
        self.factors.append(f)
        self.inverses.append(inv)
        self._sweep(len(self.factors) - 2)

    def _fix_pair(self, j: int) -> bool:
        a, ai = self.factors[j], self.inverses[j]
        b, bi = self.factors[j + 1], self.inverses[j + 1]
        n1 = self.n - 1
        changed = False
        i = 0
        while i < n1:
            if bi[i] > bi[i + 1] and a[i] < a[i + 1]:
                a[i], a[i + 1] = a[i + 1], a[i]
                ai[a[i]], ai[a[i + 1]] = i, i + 1
                p, q = bi[i], bi[i + 1]
                b[p], b[q] = i + 1, i
                bi[i], bi[i + 1] = q, p
                changed = True
                i = i - 1 if i > 0 else 0
            else:
                i += 1
        return changed

    def _sweep(self, start: int) -> None:
        j = start
        while j >= 0:
            if not self._fix_pair(j):
                break
            j -= 1
        self._cleanup()

    def _cleanup(self) -> None:
        n = self.n
        ident = list(range(n))
        while self.factors and self.factors[-1] == ident:
            self.factors.pop()
            self.inverses.pop()
        delta = list(range(n - 1, -1, -1))
        k = 0
        while k < len(self.factors) and self.factors[k] == delta:
            k += 1
        if k:
            del self.factors[:k]
            del self.inverses[:k]
            self.power += k

    def result(self) -> GarsideNormalForm:
        n = self.n
        if self.flip:
            facs = tuple(tuple(n - 1 - f[n - 1 - k] for k in range(n)) for f in self.factors)
        else:
            facs = tuple(tuple(f) for f in self.factors)
        return GarsideNormalForm(n, self.power, facs)


def normal_form(w: BraidWord) -> GarsideNormalForm:
    b = _NFBuilder(w.strand_count)
    for x in w.letters:
        if x > 0:
            b.mul_generator(x - 1)
        else:
            b.mul_inverse_generator(-x - 1)
    return b.result()


def is_left_weighted(nf: GarsideNormalForm) -> bool:
    """Check the normal-form conditions directly (used by tests)."""
    n = nf.strand_count
    ident = tuple(range(n))
    delta = tuple(range(n - 1, -1, -1))
    facs = nf.canonical_factors
    if any(f == ident or f == delta for f in facs):
        return False
    for a, b in zip(facs, facs[1:]):
        binv = [0] * n
        for k, s in enumerate(b):
            binv[s] = k
        for i in range(n - 1):
            if binv[i] > binv[i + 1] and a[i] < a[i + 1]:
                return False
    return True


def braid_equal(u: BraidWord, v: BraidWord) -> bool:
    _check_ambient([u, v])
    return normal_form(u) == normal_form(v)


# ---------------------------------------------------------------------------
# Artin action on the free group
# ---------------------------------------------------------------------------


def _fmul(*parts: Sequence[int]) -> tuple[int, ...]:
    out: list[int] = []
    for p in parts:
        for x in p:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def free_inverse(w: Sequence[int]) -> tuple[int, ...]:
    return tuple(-x for x in reversed(w))


@dataclass(frozen=True)
class FreeGroupImage:
    """Images of x_1..x_n; generator x_k is the integer k, its inverse -k."""

    images: tuple[tuple[int, ...], ...]


def artin_action(w: BraidWord) -> FreeGroupImage:
    """sigma_i: x_i -> x_i x_{i+1} x_i^-1, x_{i+1} -> x_i; phi_{uv} = phi_u o phi_v."""
    n = w.strand_count
    imgs = [(k,) for k in range(1, n + 1)]
    for x in w.letters:
        i = abs(x) - 1
        a, b = imgs[i], imgs[i + 1]
        if x > 0:
            imgs[i] = _fmul(a, b, free_inverse(a))
            imgs[i + 1] = a
        else:
            imgs[i] = b
            imgs[i + 1] = _fmul(free_inverse(b), a, b)
    return FreeGroupImage(tuple(imgs))


def artin_equal(u: BraidWord, v: BraidWord) -> bool:
    _check_ambient([u, v])
    return artin_action(u) == artin_action(v)


# ---------------------------------------------------------------------------
# Burau representation mod p
# ---------------------------------------------------------------------------


def burau_eval(w: BraidWord, t: int, modulus: int = MERSENNE_61) -> list[list[int]]:
    """Unreduced Burau matrix of ``w`` (rows of a list-of-lists) over GF(modulus).

    sigma_i acts by the block [[1-t, t], [1, 0]] on coordinates i, i+1; the
    image of a word is the ordered product of the generator matrices.
    """
    cols = _burau_columns(w, t, modulus)
    n = w.strand_count
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _burau_columns(w: BraidWord, t: int, p: int, cols: list[list[int]] | None = None):
    t %= p
    if t == 0:
        raise InvalidParameterError("t must be nonzero modulo the prime")
    n = w.strand_count
    if cols is None:
        cols = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    tinv = pow(t, p - 2, p)
    one_t = (1 - t) % p
    one_tinv = (1 - tinv) % p
    for x in w.letters:
        i = abs(x) - 1
        ci, cj = cols[i], cols[i + 1]
        if x > 0:
            cols[i] = [(one_t * a + b) % p for a, b in zip(ci, cj)]
            cols[i + 1] = [(t * a) % p for a in ci]
        else:
            cols[i] = [(tinv * b) % p for b in cj]
            cols[i + 1] = [(a + one_tinv * b) % p for a, b in zip(ci, cj)]
    return cols


def burau_columns(w: BraidWord, t: int, modulus: int = MERSENNE_61):
    """Column-major Burau image; cheaper to compare than ``burau_eval``."""
    return _burau_columns(w, t, modulus)


def matmul_mod(a: list[list[int]], b: list[list[int]], p: int) -> list[list[int]]:
    n = len(a)
    m = len(b[0])
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(a[i], bt[j])) % p for j in range(m)] for i in range(n)]


def random_burau_parameters(count: int = 3, modulus: int = MERSENNE_61, seed: int | None = None) -> list[int]:
    rng = random.Random(seed)
    return [rng.randrange(2, modulus - 1) for _ in range(count)]


def burau_equal(u: BraidWord, v: BraidWord, ts: Sequence[int] | None = None,
                modulus: int = MERSENNE_61) -> bool:
    _check_ambient([u, v])
    for t in ts if ts is not None else random_burau_parameters(3, modulus):
        if _burau_columns(u, t, modulus) != _burau_columns(v, t, modulus):
            return False
    return True
