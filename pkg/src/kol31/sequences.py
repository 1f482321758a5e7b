"""Kolakoski-(p,q) sequence generators and the two-letter block substitution.

Words over a numeric alphabet are plain strings of digit characters
("3313..."), block words are strings over {A, B, C}.  Three independent
constructions of Kol(3,1) are provided: self-reading, the alternating pair of
substitutions, and decoding the fixed point of the block substitution
A -> ABC, B -> AB, C -> B.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import groupby

from .cubic import (
    BIT_FREQ,
    CubicNumber,
    MEAN_TILE_LEN,
    ONE,
    TILE_FREQ,
    TILE_LEN,
    T,
)
from .errors import DegenerateAlphabetError

#: block substitution and the 2-bit decoding of each block letter
BLOCK_RULE = {"A": "ABC", "B": "AB", "C": "B"}
BLOCK_CODE = {"A": "33", "B": "31", "C": "11"}

_RULE_TABLE = str.maketrans(BLOCK_RULE)
_CODE_TABLE = str.maketrans(BLOCK_CODE)


def _check_pair(p: int, q: int) -> None:
    if p == q:
        raise DegenerateAlphabetError(f"degenerate alphabet p == q == {p}")
    if min(p, q) < 1:
        raise ValueError("letters must be positive integers")
    if max(p, q) > 9:
        raise ValueError("letters above 9 break the one-character export format")


def kol_selfread(p: int, q: int, n: int) -> str:
    """First ``n`` letters of Kol(p,q) by reading the word as its own
    run-length encoding.

    Run k (counted from 0) consists of copies of p for even k and of q for
    odd k; its length is the k-th letter of the word itself.  While the read
    position has not been written yet, the letter being placed names its own
    run length (this happens only at the start).
    """
    _check_pair(p, q)
    if n < 1:
        raise ValueError("n must be positive")
    seq: list[int] = []
    k = 0
    while len(seq) < n:
        letter = p if k % 2 == 0 else q
        run_len = seq[k] if k < len(seq) else letter
        seq.extend([letter] * run_len)
        k += 1
    return "".join(map(str, seq[:n]))


def kol_alternating(p: int, q: int, n: int) -> str:
    """First ``n`` letters of Kol(p,q) by iterating the two substitutions
    (p-writing on even positions, q-writing on odd positions) from seed p.

    For p = 1 the one-letter seed is already a fixed word of the iteration,
    so the two-letter prefix "1q" (first run [1], second run q's) seeds it.
    """
    _check_pair(p, q)
    if n < 1:
        raise ValueError("n must be positive")
    cp, cq = str(p), str(q)
    sub0 = {cq: cp * q, cp: cp * p}  # writes p's
    sub1 = {cq: cq * q, cp: cq * p}  # writes q's
    word = cp if p > 1 else cp + cq
    while len(word) < n:
        word = "".join(
            (sub0 if i % 2 == 0 else sub1)[ch] for i, ch in enumerate(word)
        )
    return word[:n]


def block_fixed_point(n: int) -> str:
    """Prefix of length ``n`` of the one-sided fixed point A, ABC, ABCABB, ..."""
    if n < 1:
        raise ValueError("n must be positive")
    word = "A"
    while len(word) < n:
        word = word.translate(_RULE_TABLE)
    return word[:n]


def block_fixed_point_biinfinite(iterations: int) -> tuple[str, str]:
    """(left, right) block words after ``iterations`` substitution steps from
    the two-sided seed B|A.  ``left`` is read toward the seam (its last letter
    touches the seam), ``right`` away from it."""
    left, right = "B", "A"
    for _ in range(iterations):
        left = left.translate(_RULE_TABLE)
        right = right.translate(_RULE_TABLE)
    return left, right


def decode_blocks(word: str) -> str:
    """Decode a block word to bits: A -> 33, B -> 31, C -> 11."""
    return word.translate(_CODE_TABLE)


@dataclass(frozen=True)
class SubstitutionData:
    """Block substitution matrix with its exact Perron data."""

    matrix: tuple[tuple[int, ...], ...]
    char_poly: tuple[int, ...]  # coefficients, lowest degree first
    lengths: dict
    freqs: dict
    mean_length: CubicNumber
    bit_freqs: dict


def _char_poly_3x3(m) -> tuple[int, int, int, int]:
    tr = m[0][0] + m[1][1] + m[2][2]
    minors = (
        m[1][1] * m[2][2] - m[1][2] * m[2][1]
        + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[0][0] * m[1][1] - m[0][1] * m[1][0]
    )
    det = (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
    # det(xI - M) = x^3 - tr x^2 + minors x - det
    return (-det, minors, -tr, 1)


def _mat_mul(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
        for i in range(3)
    )


def substitution_data() -> SubstitutionData:
    """Exact matrix, characteristic polynomial and Perron eigendata of the
    block substitution; every structural identity is asserted on the way."""
    letters = "ABC"
    m = tuple(
        tuple(BLOCK_RULE[i].count(j) for j in letters) for i in letters
    )
    assert m == ((1, 1, 1), (1, 1, 0), (0, 1, 0))
    m3 = _mat_mul(_mat_mul(m, m), m)
    assert all(e > 0 for row in m3 for e in row), "substitution must be primitive"
    poly = _char_poly_3x3(m)
    assert poly == (-1, 0, -2, 1)

    lengths = dict(TILE_LEN)
    freqs = dict(TILE_FREQ)
    # right eigenvector: sum_j M_ij * len_j = t * len_i
    for i, li in enumerate(letters):
        lhs = sum(
            (lengths[lj] * m[i][j] for j, lj in enumerate(letters)),
            start=CubicNumber.of(0),
        )
        assert lhs == T * lengths[li]
    # left eigenvector: sum_i freq_i * M_ij = t * freq_j
    for j, lj in enumerate(letters):
        lhs = sum(
            (freqs[li] * m[i][j] for i, li in enumerate(letters)),
            start=CubicNumber.of(0),
        )
        assert lhs == T * freqs[lj]
    assert freqs["A"] + freqs["B"] + freqs["C"] == ONE
    mean = sum(
        (freqs[L] * lengths[L] for L in letters), start=CubicNumber.of(0)
    )
    assert mean == MEAN_TILE_LEN
    # bit frequencies: each block is two bits, A gives two 3s, B one of each
    bit3 = (freqs["A"] * 2 + freqs["B"]) * Fraction(1, 2)
    assert bit3 == BIT_FREQ[3]
    assert BIT_FREQ[3] + BIT_FREQ[1] == ONE
    return SubstitutionData(
        matrix=m,
        char_poly=poly,
        lengths=lengths,
        freqs=freqs,
        mean_length=mean,
        bit_freqs=dict(BIT_FREQ),
    )


@dataclass(frozen=True)
class RunLengthReport:
    ok: bool
    checked: int


def verify_runlength_fixed(word: str) -> RunLengthReport:
    """Check that the run-length encoding of ``word`` equals its own prefix.

    The final run may be truncated by the prefix cut, so only complete runs
    are compared.
    """
    if len(word) < 2:
        raise ValueError("need at least two letters")
    run_lengths = [len(list(g)) for _, g in groupby(word)]
    complete = run_lengths[:-1]
    ok = all(int(word[i]) == L for i, L in enumerate(complete))
    return RunLengthReport(ok=ok, checked=len(complete))


def empirical_frequencies(word: str) -> dict:
    """Per-symbol relative frequencies of a nonempty word."""
    if not word:
        raise ValueError("empty word")
    n = len(word)
    out: dict = {}
    for ch in set(word):
        out[ch] = word.count(ch) / n
    return out


def classify(p: int, q: int) -> str:
    """Spectral family of the Kol(p,q) pair.

    Both letters odd: unimodular Pisot iff p = q +- 2, otherwise Pisot iff
    2(p+q) >= (p-q)**2, else all conjugates lie outside the unit circle.
    Matching parities of even letters and mixed parities get their own labels.
    """
    if p % 2 == 0 and q % 2 == 0:
        return "even_even"
    if p % 2 != q % 2:
        return "mixed_parity"
    if abs(p - q) == 2:
        return "pisot_unimodular"
    if 2 * (p + q) >= (p - q) ** 2:
        return "pisot"
    return "non_pisot"


@dataclass(frozen=True)
class BiWord:
    """Two-sided word around a seam; ``left`` is stored outward, so
    ``left[0]`` is the letter immediately left of the seam."""

    p: int
    q: int
    left: str
    right: str


def bi_word(p: int, q: int, n: int) -> BiWord:
    """Two-sided Kol(p,q) with ``n`` letters on each side: the right side is
    Kol(p,q), the left side (read away from the seam) is Kol(q,p)."""
    return BiWord(p=p, q=q, left=kol_selfread(q, p, n), right=kol_selfread(p, q, n))


def mirror_check(bi: BiWord) -> bool:
    """Mirror symmetry of the two-sided word about the first letter left of
    the seam (q = 1) or right of it (p = 1)."""
    if bi.q == 1:
        m = min(len(bi.left) - 1, len(bi.right))
        return bi.left[1 : 1 + m] == bi.right[:m]
    if bi.p == 1:
        m = min(len(bi.left), len(bi.right) - 1)
        return bi.left[:m] == bi.right[1 : 1 + m]
    raise ValueError("mirror symmetry requires p = 1 or q = 1")


@dataclass(frozen=True)
class PatchStats:
    """Distinct length-r factors with the largest start-to-start gap between
    successive occurrences of each (an empirical repetitivity radius)."""

    r: int
    scanned: int
    distinct: int
    max_gap: int
    gaps: dict


def patch_statistics(word: str, r: int) -> PatchStats:
    if r < 1 or len(word) < r:
        raise ValueError("need 1 <= r <= len(word)")
    last: dict = {}
    gaps: dict = {}
    for i in range(len(word) - r + 1):
        f = word[i : i + r]
        if f in last:
            gaps[f] = max(gaps.get(f, 0), i - last[f])
        else:
            gaps.setdefault(f, 0)
        last[f] = i
    max_gap = max(gaps.values(), default=0)
    return PatchStats(
        r=r,
        scanned=len(word),
        distinct=len(gaps),
        max_gap=max_gap,
        gaps=gaps,
    )
