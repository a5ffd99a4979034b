"""Low-energy samplers for HUBO instances: exhaustive, annealing, random.

Reproducibility contract for the stochastic samplers (portable across
languages via the generator spec in :mod:`hubofs.rng`):

* simulated annealing runs one xoshiro256** stream per chain, seeded
  ``seed + chain_index``. Chain ``c`` consumes, in order: n top-bit draws
  for the initial spins (spin 0 first, bit 1 meaning x=1/selected), then
  exactly one uniform per proposal in (sweep-major, spin-minor) order. A
  proposal flips spin i and is accepted when ``delta <= 0`` or
  ``u < exp(-delta / T)``; the uniform is drawn either way so stream
  position never depends on the data.
* random sampling uses a single stream seeded ``seed``, drawing n top bits
  per shot (shot-major, spin-minor).

Sample sets are canonicalized: duplicate configurations merge, entries sort
by (energy, lexicographic spins with -1 < +1), energies are recomputed with
the exact sparse evaluator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapabilityError, DataError, UsageError
from .hubo import (
    HuboCoefficients,
    SpinConfig,
    energies_all_states,
    energy_many,
    state_index_to_spins,
)
from .rng import Xoshiro256StarStar, VectorXoshiro256StarStar

SAMPLE_SCHEMA = "hubofs-samples/1"
DEFAULT_T_END = 0.01


@dataclass(frozen=True)
class SampleEntry:
    spins: SpinConfig
    count: int
    energy: float


@dataclass(frozen=True)
class SampleSet:
    """Multiset of spin configurations with multiplicities and energies."""

    entries: tuple[SampleEntry, ...]
    total_shots: int
    sampler_name: str
    seed: int
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if sum(e.count for e in self.entries) != self.total_shots:
            raise DataError("entry counts do not sum to total_shots")
        if any(e.count < 1 for e in self.entries):
            raise DataError("entry counts must be positive")
        if len({e.spins for e in self.entries}) != len(self.entries):
            raise DataError("duplicate spin configurations in sample set")

    @property
    def n(self) -> int:
        return len(self.entries[0].spins) if self.entries else 0

    def min_energy(self) -> float:
        return min(e.energy for e in self.entries)


def spins_to_bitstring(z: SpinConfig) -> str:
    """Binary x-representation, feature 0 leftmost ('1' = selected)."""
    return "".join("1" if s == -1 else "0" for s in z.spins)


def bitstring_to_spins(bits: str) -> SpinConfig:
    if any(ch not in "01" for ch in bits):
        raise DataError(f"invalid bitstring {bits!r}")
    return SpinConfig(tuple(1 - 2 * int(ch) for ch in bits))


def _aggregate(
    c: HuboCoefficients,
    spin_matrix: np.ndarray,
    sampler_name: str,
    seed: int,
    metadata: dict[str, str] | None = None,
) -> SampleSet:
    uniq, counts = np.unique(spin_matrix, axis=0, return_counts=True)
    energies = energy_many(c, uniq)
    order = np.argsort(energies, kind="stable")  # np.unique rows are already spin-lex
    entries = tuple(
        SampleEntry(
            spins=SpinConfig(tuple(int(v) for v in uniq[t])),
            count=int(counts[t]),
            energy=float(energies[t]),
        )
        for t in order
    )
    return SampleSet(
        entries=entries,
        total_shots=int(spin_matrix.shape[0]),
        sampler_name=sampler_name,
        seed=seed,
        metadata=metadata or {},
    )


def exhaustive_solve(c: HuboCoefficients, keep: int) -> SampleSet:
    """All 2^n configurations, keeping the ``keep`` lowest-energy ones.

    Ties break lexicographically on spins (-1 < +1). Ground-truth oracle for
    desk-scale validation; refuses n > 24.
    """
    if c.n > 24:
        raise CapabilityError(f"exhaustive enumeration needs n <= 24, got n={c.n}")
    if keep < 1:
        raise UsageError(f"keep must be >= 1, got {keep}")
    size = 1 << c.n
    if keep > size:
        raise UsageError(f"keep={keep} exceeds the 2^{c.n} = {size} configurations")
    energies = energies_all_states(c)
    states = np.arange(size, dtype=np.int64)
    # Spin-lex ascending equals state-integer descending (x=1 <-> Z=-1 at the MSB).
    order = np.lexsort((-states, energies))[:keep]
    entries = tuple(
        SampleEntry(
            spins=state_index_to_spins(int(s), c.n),
            count=1,
            energy=float(energies[s]),
        )
        for s in order
    )
    return SampleSet(
        entries=entries,
        total_shots=keep,
        sampler_name="exhaustive",
        seed=0,
    )


def _adjacency(c: HuboCoefficients):
    pair_partner: list[list[int]] = [[] for _ in range(c.n)]
    pair_val: list[list[float]] = [[] for _ in range(c.n)]
    tri_partner: list[list[tuple[int, int]]] = [[] for _ in range(c.n)]
    tri_val: list[list[float]] = [[] for _ in range(c.n)]
    for (i, j), v in c.j_terms.items():
        pair_partner[i].append(j)
        pair_val[i].append(v)
        pair_partner[j].append(i)
        pair_val[j].append(v)
    for (i, j, k), v in c.k_terms.items():
        tri_partner[i].append((j, k))
        tri_val[i].append(v)
        tri_partner[j].append((i, k))
        tri_val[j].append(v)
        tri_partner[k].append((i, j))
        tri_val[k].append(v)
    pairs = [
        (np.array(pair_partner[i], dtype=np.int64), np.array(pair_val[i], dtype=np.float64))
        for i in range(c.n)
    ]
    tris = [
        (
            np.array(tri_partner[i], dtype=np.int64).reshape(-1, 2),
            np.array(tri_val[i], dtype=np.float64),
        )
        for i in range(c.n)
    ]
    return pairs, tris


def simulated_annealing(
    c: HuboCoefficients,
    shots: int,
    sweeps: int,
    t_start: float | None = None,
    t_end: float = DEFAULT_T_END,
    seed: int = 0,
    validate_deltas: bool = False,
) -> SampleSet:
    """Independent single-spin Metropolis chains under geometric cooling.

    Each of ``shots`` chains starts uniformly at random, performs ``sweeps``
    full sweeps (spins in index order), and reports its final configuration.
    ``t_start`` defaults to 2 * n * max|coefficient| (1.0 on an all-zero
    instance). ``validate_deltas`` cross-checks every incremental energy
    delta against a full re-evaluation (slow; testing hook).
    """
    if shots < 1:
        raise UsageError(f"shots must be >= 1, got {shots}")
    if sweeps < 1:
        raise UsageError(f"sweeps must be >= 1, got {sweeps}")
    if t_end <= 0.0:
        raise UsageError(f"t_end must be > 0, got {t_end}")
    if t_start is None:
        scale = c.max_abs_coefficient()
        t_start = max(2.0 * c.n * scale if scale > 0.0 else 1.0, t_end)
    if t_start < t_end:
        raise UsageError(f"need t_start >= t_end > 0, got ({t_start}, {t_end})")

    if sweeps == 1:
        temps = np.array([t_end])
    else:
        ratio = (t_end / t_start) ** (1.0 / (sweeps - 1))
        temps = t_start * ratio ** np.arange(sweeps)

    n = c.n
    rng = VectorXoshiro256StarStar([seed + chain for chain in range(shots)])
    spins = np.empty((shots, n), dtype=np.int8)
    for i in range(n):
        spins[:, i] = 1 - 2 * rng.next_bit()

    pairs, tris = _adjacency(c)
    h = c.h.astype(np.float64)

    for temp in temps:
        for i in range(n):
            local = np.full(shots, h[i])
            partner, jv = pairs[i]
            if partner.size:
                local += spins[:, partner] @ jv
            tpartner, kv = tris[i]
            if kv.size:
                local += (spins[:, tpartner[:, 0]] * spins[:, tpartner[:, 1]]) @ kv
            delta = -2.0 * spins[:, i] * local
            if validate_deltas:
                base = energy_many(c, spins)
                flipped = spins.copy()
                flipped[:, i] = -flipped[:, i]
                full = energy_many(c, flipped) - base
                if not np.allclose(delta, full, atol=1e-10, rtol=0.0):
                    raise AssertionError("incremental delta drifted from full re-evaluation")
            u = rng.random()
            accept = u < np.exp(np.minimum(-delta / temp, 0.0))
            np.negative(spins[:, i], where=accept, out=spins[:, i])

    return _aggregate(
        c,
        spins,
        "sa",
        seed,
        {
            "sweeps": str(sweeps),
            "t_start": f"{t_start:.12g}",
            "t_end": f"{t_end:.12g}",
        },
    )


def random_sample(c: HuboCoefficients, shots: int, seed: int = 0) -> SampleSet:
    """Uniform i.i.d. configurations with exactly evaluated energies."""
    if shots < 1:
        raise UsageError(f"shots must be >= 1, got {shots}")
    rng = Xoshiro256StarStar(seed)
    spins = np.empty((shots, c.n), dtype=np.int8)
    for s in range(shots):
        for i in range(c.n):
            spins[s, i] = 1 - 2 * rng.next_bit()
    return _aggregate(c, spins, "random", seed)


def save_samples(path, s: SampleSet) -> None:
    """Write the sample CSV: '#' metadata lines, then bitstring,count,energy."""
    lines = [
        f"# schema={SAMPLE_SCHEMA}",
        f"# sampler={s.sampler_name}",
        f"# seed={s.seed}",
        f"# n={s.n}",
        f"# total_shots={s.total_shots}",
    ]
    lines.extend(f"# {key}={s.metadata[key]}" for key in sorted(s.metadata))
    lines.append("bitstring,count,energy")
    lines.extend(
        f"{spins_to_bitstring(e.spins)},{e.count},{e.energy:.12g}" for e in s.entries
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_samples(path) -> SampleSet:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read sample file {path!r}: {exc}") from exc
    meta: dict[str, str] = {}
    body: list[str] = []
    for line in raw:
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            meta[key] = value
        elif line:
            body.append(line)
    if meta.get("schema") != SAMPLE_SCHEMA:
        raise DataError(f"unknown sample schema {meta.get('schema')!r} in {path!r}")
    if not body or body[0] != "bitstring,count,energy":
        raise DataError(f"missing sample header row in {path!r}")
    entries = []
    for line in body[1:]:
        bits, count, energy = line.split(",")
        entries.append(SampleEntry(bitstring_to_spins(bits), int(count), float(energy)))
    declared = int(meta.get("total_shots", "0"))
    total = sum(e.count for e in entries)
    if declared and declared != total:
        raise DataError(f"total_shots mismatch in {path!r}: header {declared}, rows {total}")
    known = {"schema", "sampler", "seed", "n", "total_shots"}
    return SampleSet(
        entries=tuple(entries),
        total_shots=total,
        sampler_name=meta.get("sampler", "unknown"),
        seed=int(meta.get("seed", "0")),
        metadata={k: v for k, v in meta.items() if k not in known},
    )
