"""Bijective binary codes between integer indices and n-bit strings.

Four code families are provided: the standard binary code (SC), a seeded
random code (RC), the reflected Gray code (RGC) and a monotone Gray code
(MGC).  A bitstring is rendered most-significant bit first, and bit ``i``
of a bitstring is the coefficient of ``2**i``.  This convention is shared
by every module in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

Bitstring = str

CODE_KINDS = ("sc", "rc", "rgc", "mgc")

# Safety caps: explicit tables are O(2^n) memory.
MAX_TABLE_N = 24
MAX_STATS_N = 20


def _check_index(j: int, n: int) -> None:
    if n < 1:
        raise ValueError(f"bit count must be >= 1, got {n}")
    if not 0 <= j < 2**n:
        raise ValueError(f"index {j} out of range for {n} bits")


def standard_encode(j: int, n: int) -> Bitstring:
    """Binary counting: bit i of the result is floor(j / 2^i) mod 2."""
    _check_index(j, n)
    return format(j, f"0{n}b")


def standard_decode(b: Bitstring) -> int:
    """Sum of b_i * 2^i."""
    return int(b, 2)


def rgc_encode(j: int, n: int) -> Bitstring:
    """Reflected Gray code: standard code XORed with its right shift."""
    _check_index(j, n)
    return format(j ^ (j >> 1), f"0{n}b")


def rgc_decode(b: Bitstring) -> int:
    """Invert the reflected Gray code by folding the XOR from the top bit."""
    g = int(b, 2)
    j = 0
    while g:
        j ^= g
        g >>= 1
    return j


@lru_cache(maxsize=None)
def _mgc_splice_permutation(n: int) -> tuple[int, ...]:
    # Coordinate permutation that joins the weight-level subpaths of the
    # (n+1)-cube.  It is the unique choice that keeps the construction a
    # Gray path at every size: pi_n = (n-1,) + pi_{n-1} o pi_{n-1}.
    if n == 1:
        return (0,)
    prev = _mgc_splice_permutation(n - 1)
    return (n - 1,) + tuple(prev[prev[k]] for k in range(n - 1))


@lru_cache(maxsize=8)
def _mgc_sequence(n: int) -> tuple[int, ...]:
    """Monotone Gray sequence as integers, built level pair by level pair.

    ``paths[j]`` is a Hamiltonian path through all bitstrings of Hamming
    weight j and j+1; the full code alternates the traversal direction of
    consecutive level paths.  Tuples are ordered most-significant bit
    first, matching the rendering convention.
    """
    if n < 1:
        raise ValueError(f"bit count must be >= 1, got {n}")
    paths: dict[int, list[tuple[int, ...]]] = {0: [(0,), (1,)]}
    for m in range(2, n + 1):
        perm = _mgc_splice_permutation(m - 1)
        grown: dict[int, list[tuple[int, ...]]] = {}
        for j in range(m):
            upper = [(1,) + tuple(x[i] for i in perm) for x in paths.get(j - 1, [])]
            lower = [(0,) + x for x in paths.get(j, [])]
            grown[j] = upper + lower
        paths = grown
    seq: list[int] = []
    for j in range(n):
        block = paths[j] if j % 2 == 0 else paths[j][::-1]
        for bits in block:
            value = 0
            for bit in bits:
                value = (value << 1) | bit
            seq.append(value)
    return tuple(seq)


@lru_cache(maxsize=8)
def _mgc_inverse(n: int) -> dict[int, int]:
    return {b: j for j, b in enumerate(_mgc_sequence(n))}


def mgc_encode(j: int, n: int) -> Bitstring:
    """Monotone Gray code starting at the all-zero bitstring."""
    _check_index(j, n)
    return format(_mgc_sequence(n)[j], f"0{n}b")


def mgc_decode(b: Bitstring) -> int:
    """Inverse monotone Gray lookup (cached table, built on first use)."""
    return _mgc_inverse(len(b))[int(b, 2)]


def hamming(a: Bitstring, b: Bitstring) -> int:
    """Number of differing bit positions."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return (int(a, 2) ^ int(b, 2)).bit_count()


class BinaryCode:
    """A bijection between indices [0, 2^n - 1] and n-bit strings.

    ``codewords[j]`` holds the integer value of the bitstring f(j) and
    ``inverse`` is the permutation with ``inverse[codewords[j]] == j``.
    Instances are immutable after construction and safe to share.
    """

    def __init__(self, kind: str, n: int, codewords: np.ndarray, seed: int | None = None):
        inverse = np.empty(2**n, dtype=np.int64)
        inverse[codewords] = np.arange(2**n)
        self.kind = kind
        self.n = n
        self.seed = seed
        self.codewords = codewords
        self.inverse = inverse
        codewords.setflags(write=False)
        inverse.setflags(write=False)

    def encode(self, j: int) -> Bitstring:
        _check_index(j, self.n)
        return format(int(self.codewords[j]), f"0{self.n}b")

    def decode(self, b: Bitstring) -> int:
        if len(b) != self.n:
            raise ValueError(f"expected {self.n} bits, got {len(b)}")
        return int(self.inverse[int(b, 2)])

    @property
    def name(self) -> str:
        if self.kind == "rc":
            return f"rc(seed={self.seed})"
        return self.kind

    def __repr__(self) -> str:
        return f"BinaryCode({self.name}, n={self.n})"


def make_code(kind: str, n: int, seed: int | None = None, max_table_n: int = MAX_TABLE_N) -> BinaryCode:
    """Build a code table for one of the four kinds ("sc", "rc", "rgc", "mgc")."""
    kind = kind.lower()
    if n < 1:
        raise ValueError(f"bit count must be >= 1, got {n}")
    if n > max_table_n:
        raise ValueError(f"n={n} exceeds table cap {max_table_n}")
    j = np.arange(2**n, dtype=np.int64)
    if kind == "sc":
        codewords = j
    elif kind == "rgc":
        codewords = j ^ (j >> 1)
    elif kind == "mgc":
        codewords = np.array(_mgc_sequence(n), dtype=np.int64)
    elif kind == "rc":
        if seed is None:
            raise ValueError("random code requires a seed")
        # Fisher-Yates shuffle via numpy's PCG64 generator: deterministic
        # for a given seed on every platform.
        rng = np.random.Generator(np.random.PCG64(seed))
        codewords = rng.permutation(2**n).astype(np.int64)
    else:
        raise ValueError(f"unknown code kind {kind!r}; expected one of {CODE_KINDS}")
    return BinaryCode(kind, n, codewords, seed=seed)


@dataclass(frozen=True)
class CodeStats:
    avg_neighbor_hamming: Fraction
    run_length: int
    is_gray: bool
    is_monotone: bool


def _popcount(values: np.ndarray) -> np.ndarray:
    # np.bitwise_count returns uint8; widen before any arithmetic
    return np.bitwise_count(values).astype(np.int64)


def _neighbor_distances(codewords: np.ndarray, k: int) -> np.ndarray:
    return _popcount(codewords[:-k] ^ codewords[k:])


def code_stats(code: BinaryCode, max_n: int = MAX_STATS_N) -> CodeStats:
    """Exhaustive structural statistics of a code table."""
    if code.n > max_n:
        raise ValueError(f"n={code.n} exceeds exhaustive-scan cap {max_n}")
    cw = code.codewords
    d1 = _neighbor_distances(cw, 1)
    avg = Fraction(int(d1.sum(dtype=np.int64)), len(cw) - 1)
    is_gray = bool(np.all(d1 == 1))

    # Largest r such that every index distance k <= r maps to Hamming
    # distance exactly k; capped by the largest index distance present.
    run_length = 0
    for k in range(1, len(cw)):
        if np.all(_neighbor_distances(cw, k) == k):
            run_length = k
        else:
            break

    weights = _popcount(cw)
    suffix_min = np.minimum.accumulate(weights[::-1])[::-1]
    prefix_max = np.maximum.accumulate(weights)
    is_monotone = bool(np.all(suffix_min >= prefix_max - 1))
    return CodeStats(avg, run_length, is_gray, is_monotone)


def sc_average_neighbor_hamming(n: int) -> Fraction:
    """Closed form 2^n/(2^n - 1) * (2 - (n + 2)/2^n) for binary counting."""
    return Fraction(2**n, 2**n - 1) * (2 - Fraction(n + 2, 2**n))


def rc_average_neighbor_hamming(n: int) -> Fraction:
    """Expected value 2^n/(2^n - 1) * n/2 for a uniformly random bijection."""
    return Fraction(2**n, 2**n - 1) * Fraction(n, 2)


def check_code_properties(n_max: int = 16, rc_seed: int = 0) -> tuple[list[str], list[str]]:
    """Exhaustive structural checks for n = 1..n_max.

    Returns (report lines, failure lines); failures carry the violating
    index pair where one exists.
    """
    if n_max > 16:
        raise ValueError(f"exhaustive checks capped at n=16, got {n_max}")
    report: list[str] = []
    failures: list[str] = []

    def fail(msg: str) -> None:
        failures.append(msg)
        report.append("FAIL " + msg)

    for n in range(1, n_max + 1):
        j = np.arange(2**n, dtype=np.int64)
        for kind in CODE_KINDS:
            code = make_code(kind, n, seed=rc_seed)
            bad = np.nonzero(code.inverse[code.codewords] != j)[0]
            if bad.size:
                fail(f"{kind} n={n}: decode(encode(j)) != j at j={int(bad[0])}")
        for kind in ("rgc", "mgc"):
            code = make_code(kind, n)
            d1 = _neighbor_distances(code.codewords, 1)
            bad = np.nonzero(d1 != 1)[0]
            if bad.size:
                i = int(bad[0])
                fail(f"{kind} n={n}: H(f({i}), f({i + 1})) = {int(d1[i])} != 1")
        rgc = make_code("rgc", n)
        if n >= 2 and code_stats(rgc).run_length != 2:
            fail(f"rgc n={n}: run length != 2")
        # neighbor XOR structure: f(i) ^ f(i+1) has its single 1 at the
        # lowest zero-bit position of i
        diffs = rgc.codewords[:-1] ^ rgc.codewords[1:]
        expected = np.bitwise_and(j[:-1] + 1, ~j[:-1])
        bad = np.nonzero(diffs != expected)[0]
        if bad.size:
            fail(f"rgc n={n}: XOR-difference structure broken at i={int(bad[0])}")
        if n >= 2:
            half = 2 ** (n - 1)
            mirrored = rgc.codewords[: half] ^ rgc.codewords[::-1][: half]
            if not np.all(mirrored == half):
                fail(f"rgc n={n}: reflection symmetry broken")
        mgc_stats = code_stats(make_code("mgc", n))
        if not mgc_stats.is_monotone:
            fail(f"mgc n={n}: Hamming weight not almost-monotone")
        sc_avg = code_stats(make_code("sc", n)).avg_neighbor_hamming
        closed = sc_average_neighbor_hamming(n)
        if sc_avg != closed:
            fail(f"sc n={n}: average neighbor Hamming {sc_avg} != closed form {closed}")
        report.append(f"n={n}: ok, sc average neighbor Hamming = {sc_avg} (= closed form)")
    return report, failures


def render_code_table(n: int, max_render_n: int = 8) -> str:
    """Table of f_SC, f_RGC and f_MGC for all indices, one code per row."""
    if not 1 <= n <= max_render_n:
        raise ValueError(f"table rendering supports 1 <= n <= {max_render_n}, got {n}")
    indices = list(range(2**n))
    width = max(n, len(str(indices[-1])))
    rows = [
        ("i", [str(j) for j in indices]),
        ("f_SC(i)", [standard_encode(j, n) for j in indices]),
        ("f_RGC(i)", [rgc_encode(j, n) for j in indices]),
        ("f_MGC(i)", [mgc_encode(j, n) for j in indices]),
    ]
    label_width = max(len(label) for label, _ in rows)
    lines = [
        f"{label:<{label_width}}  " + "  ".join(f"{cell:>{width}}" for cell in cells)
        for label, cells in rows
    ]
    return "\n".join(lines)
