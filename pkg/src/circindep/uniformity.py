"""Tests of circular uniformity: Rayleigh and Pycke.

The Rayleigh test targets unimodal departures from uniformity and uses
the small-sample p-value approximation of Fisher (1993, p. 70).  The
Pycke (2010) test targets multimodal departures; its null distribution
has no closed form, so p-values come from simulated null tables that are
cached on disk keyed by sample size, replicate count, seed and the
statistic convention.
"""

from __future__ import annotations

import math
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .circular import TWO_PI, _as_angles, mean_resultant_length
from .errors import DomainError
from .rng import derive_rng

__all__ = [
    "UniformityResult",
    "PyckeNullTable",
    "rayleigh_statistic",
    "rayleigh_pvalue",
    "rayleigh_test",
    "pycke_statistic",
    "build_pycke_null_table",
    "pycke_pvalue",
    "pycke_test",
    "get_pycke_null_table",
    "save_pycke_null_table",
    "load_pycke_null_table",
    "default_cache_dir",
    "PYCKE_CONVENTION",
]

# Tag identifying the statistic convention baked into cached tables: the
# double sum includes the i == j diagonal.  Bump if the formula changes.
PYCKE_CONVENTION = "pycke-diag-v1"

_SQRT_HALF = math.sqrt(0.5)

# Above this sample size the pairwise double sum is evaluated through its
# geometric-series expansion (see _pycke_series); identical value, O(n*K)
# instead of O(n^2).
_SERIES_THRESHOLD = 512


@dataclass(frozen=True)
class UniformityResult:
    """Outcome of a circular uniformity test."""

    method: str  # "rayleigh" or "pycke"
    statistic: float
    p_value: float
    n: int


@dataclass(frozen=True)
class PyckeNullTable:
    """Simulated null distribution of the Pycke statistic for one sample size."""

    n: int
    reps: int
    seed: int
    null_stats: np.ndarray = field(repr=False)
    convention: str = PYCKE_CONVENTION

    def __post_init__(self):
        arr = np.asarray(self.null_stats, dtype=float)
        if arr.size != self.reps or self.reps < 1:
            raise DomainError("null_stats length must equal reps and be >= 1")
        if np.any(np.diff(arr) < 0):
            raise DomainError("null_stats must be sorted ascending")
        arr.flags.writeable = False
        object.__setattr__(self, "null_stats", arr)


def rayleigh_statistic(s) -> float:
    """Rayleigh statistic ``2 n R^2`` with ``R`` the mean resultant length."""
    theta = _as_angles(s)
    n = theta.size
    if n < 2:
        raise DomainError("the Rayleigh test needs at least 2 observations")
    r_bar = mean_resultant_length(theta)
    return 2.0 * n * r_bar**2


def rayleigh_pvalue(r_bar: float, n: int) -> float:
    """Rayleigh p-value with the small-sample series correction.

    With ``Z = n * r_bar**2``::

        p = exp(-Z) * (1 + (2Z - Z^2)/(4n)
                         - (24Z - 132Z^2 + 76Z^3 - 9Z^4)/(288 n^2))

    clamped to [0, 1].  Fisher (1993, p. 70).
    """
    if not (0.0 <= r_bar <= 1.0):
        raise DomainError("mean resultant length must lie in [0, 1]")
    if n < 2:
        raise DomainError("sample size must be at least 2")
    z = n * r_bar**2
    p = math.exp(-z) * (
        1.0
        + (2.0 * z - z**2) / (4.0 * n)
        - (24.0 * z - 132.0 * z**2 + 76.0 * z**3 - 9.0 * z**4) / (288.0 * n**2)
    )
    return min(1.0, max(0.0, p))


def rayleigh_test(s) -> UniformityResult:
    """Run the Rayleigh uniformity test on a circular sample."""
    theta = _as_angles(s)
    statistic = rayleigh_statistic(theta)
    p = rayleigh_pvalue(mean_resultant_length(theta), theta.size)
    return UniformityResult("rayleigh", statistic, p, theta.size)


def _pycke_direct(theta: np.ndarray) -> float:
    # Literal double sum over all (i, j) pairs, diagonal included.
    cos_d = np.cos(theta[:, None] - theta[None, :])
    kernel = 2.0 * (cos_d - _SQRT_HALF) / (1.5 - 2.0 * _SQRT_HALF * cos_d)
    return float(kernel.sum() / theta.size)


def _pycke_series(theta: np.ndarray, tol: float = 1e-12) -> float:
    # The kernel has the expansion 2(cos d - r)/(1 - 2 r cos d + r^2)
    # = 2 * sum_{k>=1} r^(k-1) cos(k d) with r = sqrt(0.5), so the double
    # sum collapses to (2/n) * sum_k r^(k-1) |sum_i e^{i k theta}|^2.
    # Truncation after K terms is bounded by 2 n r^K / (1 - r).
    n = theta.size
    r = _SQRT_HALF
    k_max = int(math.ceil(math.log(tol * (1.0 - r) / (2.0 * n)) / math.log(r)))
    z = np.exp(1j * theta)
    z_k = z.copy()
    total = 0.0
    weight = 1.0
    for _ in range(k_max):
        s_k = z_k.sum()
        total += weight * (s_k.real**2 + s_k.imag**2)
        z_k *= z
        weight *= r
    return 2.0 * total / n


def pycke_statistic(s) -> float:
    """Pycke statistic: mean pairwise kernel value, ``i == j`` terms included.

    ``(1/n) * sum_ij 2(cos(t_i - t_j) - sqrt(0.5))
    / (1.5 - 2 sqrt(0.5) cos(t_i - t_j))``.  The diagonal contributes the
    data-independent constant ``2(1 - sqrt(0.5))/(1.5 - 2 sqrt(0.5))``
    per observation; inference is unaffected as long as null tables use
    the same convention.  Invariant under common rotation.
    """
    theta = _as_angles(s)
    if theta.size < 2:
        raise DomainError("the Pycke test needs at least 2 observations")
    if theta.size > _SERIES_THRESHOLD:
        return _pycke_series(theta)
    return _pycke_direct(theta)


def build_pycke_null_table(n: int, reps: int, seed: int) -> PyckeNullTable:
    """Simulate the null distribution of the Pycke statistic.

    Each replicate draws ``n`` i.i.d. circular-uniform angles from its own
    deterministically derived stream, so the table does not depend on how
    replicates would be scheduled across workers.
    """
    if n < 2:
        raise DomainError("sample size must be at least 2")
    if reps < 1000:
        raise DomainError("null tables need at least 1000 replicates")
    stats = np.empty(reps)
    for rep in range(reps):
        rng = derive_rng(seed, "pycke-null", rep)
        theta = TWO_PI * (1.0 - rng.random(n))  # values in (0, 2*pi]
        stats[rep] = pycke_statistic(theta)
    stats.sort()
    return PyckeNullTable(n=n, reps=reps, seed=seed, null_stats=stats)


def pycke_pvalue(statistic: float, table: PyckeNullTable) -> float:
    """Monte-Carlo p-value ``(1 + #{null >= stat}) / (reps + 1)``."""
    idx = int(np.searchsorted(table.null_stats, statistic, side="left"))
    count_ge = table.reps - idx
    return (1 + count_ge) / (table.reps + 1)


def pycke_test(s, table: PyckeNullTable) -> UniformityResult:
    """Run the Pycke uniformity test against a simulated null table."""
    theta = _as_angles(s)
    if theta.size != table.n:
        raise DomainError(
            f"null table is for n={table.n}, sample has n={theta.size}"
        )
    statistic = pycke_statistic(theta)
    return UniformityResult("pycke", statistic, pycke_pvalue(statistic, table), theta.size)


# ---------------------------------------------------------------------------
# Disk cache.  Power studies reuse the same table thousands of times, so
# tables are persisted as small versioned CSV files.

_cache_lock = threading.Lock()


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME")
    root = Path(base) if base else Path.home() / ".cache"
    return root / "circindep"


def _table_path(cache_dir: Path, n: int, reps: int, seed: int) -> Path:
    return cache_dir / f"pycke_n{n}_reps{reps}_seed{seed}_{PYCKE_CONVENTION}.csv"


def save_pycke_null_table(table: PyckeNullTable, path) -> None:
    """Write a table atomically: header row, metadata row, one stat per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write("n,reps,seed,convention\n")
            fh.write(f"{table.n},{table.reps},{table.seed},{table.convention}\n")
            fh.write("statistic\n")
            for value in table.null_stats:
                fh.write(f"{value!r}\n")
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def load_pycke_null_table(path) -> PyckeNullTable:
    path = Path(path)
    with open(path, newline="") as fh:
        header = fh.readline().strip()
        if header != "n,reps,seed,convention":
            raise DomainError(f"unrecognized null-table header in {path}")
        n_str, reps_str, seed_str, convention = fh.readline().strip().split(",")
        if fh.readline().strip() != "statistic":
            raise DomainError(f"malformed null-table body in {path}")
        stats = np.array([float(line) for line in fh if line.strip()])
    return PyckeNullTable(
        n=int(n_str),
        reps=int(reps_str),
        seed=int(seed_str),
        null_stats=stats,
        convention=convention,
    )


def get_pycke_null_table(
    n: int, reps: int, seed: int, cache_dir=None
) -> PyckeNullTable:
    """Fetch a null table from the cache, building and storing it on a miss.

    Concurrent readers are safe; construction is serialized within the
    process and written atomically, so racing processes at worst rebuild
    the same deterministic content.
    """
    cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    path = _table_path(cache_dir, n, reps, seed)
    if path.exists():
        return load_pycke_null_table(path)
    with _cache_lock:
        if path.exists():
            return load_pycke_null_table(path)
        table = build_pycke_null_table(n, reps, seed)
        save_pycke_null_table(table, path)
    return table
