"""Code matrices for one-vs-all, all-pairs and error-correcting output codes.

A code matrix has one row per binary classifier and one column per class.
Entries are stored as ``int8`` with ``POS = 1``, ``NEG = 0`` and
``DONTCARE = -1``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import GenerationFailed, InvalidClassCount, ParseError


class CodeEntry(enum.IntEnum):
    NEG = 0
    POS = 1
    DONTCARE = -1

    @property
    def symbol(self) -> str:
        return _TO_SYMBOL[self]

    @classmethod
    def from_symbol(cls, s: str) -> "CodeEntry":
        try:
            return _FROM_SYMBOL[str(s).strip()]
        except KeyError:
            raise ParseError(f"unknown code entry {s!r}") from None


_TO_SYMBOL = {CodeEntry.POS: "1", CodeEntry.NEG: "0", CodeEntry.DONTCARE: "*"}
_FROM_SYMBOL = {v: k for k, v in _TO_SYMBOL.items()}

POS, NEG, DONTCARE = int(CodeEntry.POS), int(CodeEntry.NEG), int(CodeEntry.DONTCARE)


class Scheme(str, enum.Enum):
    OVA = "ova"
    ALL_PAIRS = "allpairs"
    ECOC_COMPLETE = "ecoc-complete"
    ECOC_SPARSE_RANDOM = "ecoc-sparse-random"


@dataclass(frozen=True, eq=False)
class CodeMatrix:
    entries: np.ndarray  # (M, K) int8
    scheme: Scheme

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.int8)
        if e.ndim != 2:
            raise ParseError("code matrix must be two-dimensional")
        if not np.isin(e, (POS, NEG, DONTCARE)).all():
            raise ParseError("code matrix entries must be POS, NEG or DONTCARE")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "scheme", Scheme(self.scheme))

    @property
    def M(self) -> int:
        return self.entries.shape[0]

    @property
    def K(self) -> int:
        return self.entries.shape[1]

    def signed(self) -> np.ndarray:
        """Entries mapped to +1 (POS), -1 (NEG), 0 (DONTCARE)."""
        e = self.entries
        return np.where(e == POS, 1.0, np.where(e == NEG, -1.0, 0.0))

    def __eq__(self, other):
        if not isinstance(other, CodeMatrix):
            return NotImplemented
        return self.scheme == other.scheme and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.scheme, self.entries.tobytes(), self.entries.shape))

    def validation_errors(self) -> list[str]:
        """Violated invariants, empty when the matrix is valid."""
        e = self.entries
        problems = []
        if self.K < 3:
            problems.append(f"K={self.K} < 3")
        bad_rows = np.flatnonzero(~((e == POS).any(axis=1) & (e == NEG).any(axis=1)))
        if bad_rows.size:
            problems.append(f"rows without both a POS and a NEG entry: {bad_rows.tolist()}")
        empty_cols = np.flatnonzero((e == DONTCARE).all(axis=0))
        if empty_cols.size:
            problems.append(f"columns with only DONTCARE entries: {empty_cols.tolist()}")
        if self.scheme is Scheme.ECOC_SPARSE_RANDOM:
            weak = np.flatnonzero(~((e == POS).any(axis=0) & (e == NEG).any(axis=0)))
            if weak.size:
                problems.append(f"columns without both a POS and a NEG entry: {weak.tolist()}")
        if self.K >= 2 and self.M > 0:
            d = column_distances(self.signed())
            iu = np.triu_indices(self.K, 1)
            if (d[iu] == 0).any():
                problems.append("identical columns")
        return problems

    def is_valid(self) -> bool:
        return not self.validation_errors()

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "K": self.K,
            "M": self.M,
            "rows": [[CodeEntry(int(v)).symbol for v in row] for row in self.entries],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "CodeMatrix":
        try:
            rows = [[int(CodeEntry.from_symbol(s)) for s in row] for row in obj["rows"]]
            scheme = Scheme(obj["scheme"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"malformed code-matrix object: {exc}") from exc
        if not rows or len({len(r) for r in rows}) != 1:
            raise ParseError("code-matrix rows must be non-empty and of equal length")
        cm = cls(np.array(rows, dtype=np.int8), scheme)
        if "K" in obj and int(obj["K"]) != cm.K or "M" in obj and int(obj["M"]) != cm.M:
            raise ParseError("declared K/M disagree with the rows")
        return cm


def _check_k(K: int) -> None:
    if int(K) != K or K < 3:
        raise InvalidClassCount(f"need at least 3 classes, got {K}")


def gen_ova(K: int) -> CodeMatrix:
    _check_k(K)
    return CodeMatrix(np.eye(K, dtype=np.int8), Scheme.OVA)


def gen_allpairs(K: int) -> CodeMatrix:
    """One row per pair (a, b), a < b, in lexicographic order: a is POS, b is NEG."""
    _check_k(K)
    pairs = list(itertools.combinations(range(K), 2))
    e = np.full((len(pairs), K), DONTCARE, dtype=np.int8)
    for j, (a, b) in enumerate(pairs):
        e[j, a] = POS
        e[j, b] = NEG
    return CodeMatrix(e, Scheme.ALL_PAIRS)


def _complete_code(K: int) -> np.ndarray:
    # class 1 always POS; bits of v give membership of classes 2..K (class 2 = MSB)
    M = 2 ** (K - 1) - 1
    e = np.empty((M, K), dtype=np.int8)
    e[:, 0] = POS
    for v in range(M):
        for c in range(1, K):
            bit = (v >> (K - 1 - c)) & 1
            e[v, c] = POS if bit else NEG
    return e


def sparse_code_length(K: int) -> int:
    return math.ceil(15 * math.log2(K))


def column_distances(signed: np.ndarray) -> np.ndarray:
    """Pairwise generalized Hamming distances between columns.

    ``signed`` holds +1/-1/0 entries with shape ``(..., M, K)``.  A row adds 1
    when both entries are defined and differ, 0.5 when exactly one is DONTCARE.
    """
    s = np.asarray(signed, dtype=float)
    a = np.abs(s)
    defined = a.sum(axis=-2)
    same_sign = np.swapaxes(s, -1, -2) @ s
    both = np.swapaxes(a, -1, -2) @ a
    d = 0.5 * (defined[..., :, None] + defined[..., None, :]) - 0.5 * both - 0.5 * same_sign
    return d


def code_distance(C: CodeMatrix) -> float:
    """Minimum generalized Hamming distance over all column pairs."""
    d = column_distances(C.signed())
    iu = np.triu_indices(C.K, 1)
    return float(d[iu].min())


def _sample_entries(rng, shape) -> np.ndarray:
    u = rng.random(shape)
    return np.where(u < 0.5, 0.0, np.where(u < 0.75, 1.0, -1.0))


def _sample_valid_rows(rng, n: int, M: int, K: int) -> np.ndarray:
    # Rows are independent, so redrawing only the rows lacking a POS or a NEG
    # samples exactly the iid law conditioned on every row being valid.
    s = _sample_entries(rng, (n, M, K))
    while True:
        bad = ~((s > 0).any(axis=2) & (s < 0).any(axis=2))
        nbad = int(bad.sum())
        if not nbad:
            return s
        s[bad] = _sample_entries(rng, (nbad, K))


def gen_ecoc(K: int, seed: int = 0, n_candidates: int = 20_000, batch: int = 500) -> CodeMatrix:
    """Complete code for K < 8, otherwise the best of ``n_candidates`` sparse random codes.

    Sparse entries are DONTCARE with probability 1/2 and POS/NEG with 1/4
    each, conditioned on every row holding at least one POS and one NEG.
    Candidates with a column lacking POS or NEG, or with duplicate columns,
    are discarded; among the rest the one with the largest minimum column
    distance wins, ties going to the lowest index.
    """
    _check_k(K)
    if K < 8:
        return CodeMatrix(_complete_code(K), Scheme.ECOC_COMPLETE)

    M = sparse_code_length(K)
    rng = np.random.Generator(np.random.PCG64(seed))
    iu = np.triu_indices(K, 1)
    best, best_kappa = None, -1.0
    done = 0
    while done < n_candidates:
        n = min(batch, n_candidates - done)
        s = _sample_valid_rows(rng, n, M, K)
        pos, neg = s > 0, s < 0
        ok = (pos.any(axis=1) & neg.any(axis=1)).all(axis=1)
        if ok.any():
            idx = np.flatnonzero(ok)
            kappa = column_distances(s[idx])[:, iu[0], iu[1]].min(axis=1)
            kappa = np.where(kappa > 0, kappa, -1.0)
            j = int(np.argmax(kappa))
            if kappa[j] > best_kappa:
                best_kappa = float(kappa[j])
                best = s[idx[j]]
        done += n
    if best is None:
        raise GenerationFailed(f"no valid sparse code among {n_candidates} candidates (seed={seed})")
    e = np.where(best > 0, POS, np.where(best < 0, NEG, DONTCARE)).astype(np.int8)
    return CodeMatrix(e, Scheme.ECOC_SPARSE_RANDOM)


def make_code(scheme: str, K: int, seed: int = 0) -> CodeMatrix:
    """Dispatch on the short scheme names used by the CLI (``aps``, ``ova``, ``ecoc``)."""
    key = scheme.lower()
    if key in ("ova",):
        return gen_ova(K)
    if key in ("aps", "allpairs", "all-pairs"):
        return gen_allpairs(K)
    if key in ("ecoc",):
        return gen_ecoc(K, seed)
    raise ValueError(f"unknown encoding {scheme!r}")
