"""Exact verification of pure-braid presentations through the Artin action
on a free group.

A free word is a reduced tuple of (generator index, +-1) pairs.  The braid
generator s_i acts by x_i -> x_i x_{i+1} x_i^-1, x_{i+1} -> x_i and fixes
the other generators; the pure generators a_ij expand as
(s_{j-1} ... s_{i+1}) s_i^2 (s_{i+1}^-1 ... s_{j-1}^-1).  Relations are
decided exactly: both sides must act identically on every free generator
after free reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

DEFAULT_MAX_STRANDS = 8


class BraidError(ValueError):
    pass


# ---------------------------------------------------------------------------
# free words

def free_reduce(letters):
    """Cancel adjacent inverse pairs; the reduced word is canonical."""
    out = []
    for g, e in letters:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def word(*letters):
    return free_reduce(letters)


def invert_word(w):
    return tuple((g, -e) for g, e in reversed(w))


def mul(*words):
    letters = []
    for w in words:
        letters.extend(w)
    return free_reduce(letters)


def generator(i):
    return ((i, 1),)


def abelianized(w, n):
    """Exponent-sum vector of a free word on n generators."""
    v = [0] * n
    for g, e in w:
        v[g - 1] += e
    return tuple(v)


# ---------------------------------------------------------------------------
# Artin action

def _act_sigma(i, sign, w, n):
    """Action of s_i^sign on a free word."""
    if not 1 <= i <= n - 1:
        raise BraidError(f"braid index {i} out of range for {n} strands")
    out = []
    for g, e in w:
        if sign == 1:
            if g == i:
                image = ((i, 1), (i + 1, 1), (i, -1))
            elif g == i + 1:
                image = ((i, 1),)
            else:
                image = ((g, 1),)
        else:
            if g == i:
                image = ((i + 1, 1),)
            elif g == i + 1:
                image = ((i + 1, -1), (i, 1), (i + 1, 1))
            else:
                image = ((g, 1),)
        out.extend(image if e == 1 else invert_word(image))
    return free_reduce(out)


def artin_act(braid, w, n):
    """Apply a braid word (sequence of (index, +-1)) to a free word.

    Composition convention: the rightmost letter acts first, so
    act(b1 b2, w) = act(b1, act(b2, w)).
    """
    if n > DEFAULT_MAX_STRANDS:
        raise BraidError(f"strand count {n} above cap {DEFAULT_MAX_STRANDS}")
    for g, e in braid:
        if not 1 <= g <= n - 1:
            raise BraidError(f"braid index {g} out of range for {n} strands")
        if e not in (1, -1):
            raise BraidError("braid exponents must be +-1")
    result = free_reduce(w)
    for g, e in reversed(braid):
        result = _act_sigma(g, e, result, n)
    return result


def alpha_word(i, j):
    """a_ij as a braid word: (s_{j-1} ... s_{i+1}) s_i^2 (s_{i+1}^-1 ... s_{j-1}^-1)."""
    if not 1 <= i < j:
        raise BraidError("need 1 <= i < j")
    prefix = [(k, 1) for k in range(j - 1, i, -1)]
    suffix = [(k, -1) for k in range(i + 1, j)]
    return tuple(prefix + [(i, 1), (i, 1)] + suffix)


def braid_invert(b):
    return tuple((g, -e) for g, e in reversed(b))


def braid_mul(*braids):
    out = []
    for b in braids:
        out.extend(b)
    return tuple(out)


def acts_equally(b1, b2, n) -> bool:
    """Exact equality of the induced free-group automorphisms."""
    return all(
        artin_act(b1, generator(g), n) == artin_act(b2, generator(g), n)
        for g in range(1, n + 1)
    )


def acts_trivially(b, n) -> bool:
    return all(artin_act(b, generator(g), n) == generator(g) for g in range(1, n + 1))


# ---------------------------------------------------------------------------
# relation families

@dataclass
class RelationFamilyReport:
    family: str
    n: int
    tuples_checked: int
    identities_checked: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "tuples": self.tuples_checked,
            "identities": self.identities_checked,
            "failures": [str(f) for f in self.failures],
            "ok": self.ok,
        }


def verify_yb3(n: int) -> RelationFamilyReport:
    """a_ij a_ik a_jk = a_ik a_jk a_ij = a_jk a_ij a_ik for all i < j < k."""
    if n < 3:
        raise BraidError("the triple relations need at least 3 strands")
    failures = []
    count = 0
    idents = 0
    for i, j, k in combinations(range(1, n + 1), 3):
        count += 1
        aij, aik, ajk = alpha_word(i, j), alpha_word(i, k), alpha_word(j, k)
        w1 = braid_mul(aij, aik, ajk)
        w2 = braid_mul(aik, ajk, aij)
        w3 = braid_mul(ajk, aij, aik)
        for lhs, rhs, name in ((w1, w2, "first=second"), (w2, w3, "second=third")):
            idents += 1
            if not acts_equally(lhs, rhs, n):
                failures.append((i, j, k, name))
    return RelationFamilyReport("YB3", n, count, idents, failures)


def _commutator(a, b):
    return braid_mul(a, b, braid_invert(a), braid_invert(b))


def verify_yb4(n: int) -> RelationFamilyReport:
    """[a_kl, a_ij] = [a_jl, a_jk^-1 a_ik a_jk] = [a_il, a_jk]
    = [a_jl, a_kl a_ik a_kl^-1] = 1 for all i < j < k < l.

    For n < 4 there are no index tuples and the family holds vacuously.
    """
    if n < 2:
        raise BraidError("need at least 2 strands")
    failures = []
    count = 0
    idents = 0
    for i, j, k, l in combinations(range(1, n + 1), 4):
        count += 1
        aij, aik, ajk = alpha_word(i, j), alpha_word(i, k), alpha_word(j, k)
        ail, ajl, akl = alpha_word(i, l), alpha_word(j, l), alpha_word(k, l)
        conj1 = braid_mul(braid_invert(ajk), aik, ajk)
        conj2 = braid_mul(akl, aik, braid_invert(akl))
        checks = (
            ("[a_kl, a_ij]", _commutator(akl, aij)),
            ("[a_jl, a_jk^-1 a_ik a_jk]", _commutator(ajl, conj1)),
            ("[a_il, a_jk]", _commutator(ail, ajk)),
            ("[a_jl, a_kl a_ik a_kl^-1]", _commutator(ajl, conj2)),
        )
        for name, wb in checks:
            idents += 1
            if not acts_trivially(wb, n):
                failures.append((i, j, k, l, name))
    return RelationFamilyReport("YB4", n, count, idents, failures)


# ---------------------------------------------------------------------------
# the full twist

def garside_Dk(k: int):
    """The product a_12 (a_13 a_23) ... (a_1k ... a_{k-1,k}) over pure
    generators, as a list of (i, j) pairs; length k(k-1)/2."""
    if k < 2:
        raise BraidError("the full twist needs at least 2 strands")
    out = []
    for j in range(2, k + 1):
        for i in range(1, j):
            out.append((i, j))
    return out


def garside_Dk_braid(k: int):
    return braid_mul(*[alpha_word(i, j) for i, j in garside_Dk(k)])


def delta_k(k: int):
    """Half-twist braid word (s_1)(s_2 s_1)(s_3 s_2 s_1)...(s_{k-1} ... s_1)."""
    out = []
    for j in range(1, k):
        out.extend((i, 1) for i in range(j, 0, -1))
    return tuple(out)


def dk_abelianization_trivial(k: int) -> bool:
    """The full twist fixes every generator's abelianized image."""
    b = garside_Dk_braid(k)
    for g in range(1, k + 1):
        img = artin_act(b, generator(g), k)
        if abelianized(img, k) != abelianized(generator(g), k):
            return False
    return True


def dk_equals_delta_squared(k: int) -> bool:
    """Optional cross-check: the full twist is the squared half-twist."""
    dd = braid_mul(delta_k(k), delta_k(k))
    return acts_equally(garside_Dk_braid(k), dd, k)
