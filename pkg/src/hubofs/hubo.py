"""Ising HUBO energy model built from globally normalized MI tensors.

Spin convention: Z_i = -1 means feature i is selected, Z_i = +1 means it is
not; the binary view is x_i = (1 - Z_i) / 2. The energy of a configuration is

    E(Z) = sum_i h_i Z_i + sum_{i<j} J_ij Z_i Z_j
         + sum_{i<j<k} K_ijk Z_i Z_j Z_k + constant

with terms always accumulated in ascending index-tuple order, so every
evaluator in this package (scalar, batched, all-states) produces bitwise
identical floats for the same configuration.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, UsageError
from .mi import MiTensors

COEFF_SCHEMA = "hubofs-coefficients/1"

DEFAULT_WEIGHTS = (1.0, 0.5, 0.3)
DEFAULT_PENALTY = (0.5, 0.2, 2.0)  # (lambda, tau, p)


class DegenerateNormalizationWarning(RuntimeWarning):
    """All MI values are equal; min-max normalization collapses to zeros."""


@dataclass(frozen=True, order=True)
class SpinConfig:
    """Immutable spin assignment; compares lexicographically with -1 < +1."""

    spins: tuple[int, ...]

    def __post_init__(self):
        if any(s not in (-1, 1) for s in self.spins):
            raise UsageError(f"spins must be -1 or +1, got {self.spins}")

    def __len__(self) -> int:
        return len(self.spins)


def to_binary(z: SpinConfig) -> tuple[int, ...]:
    """x_i = (1 - Z_i) / 2: selected features become 1."""
    return tuple((1 - s) // 2 for s in z.spins)


def to_spin(x) -> SpinConfig:
    """Inverse map Z_i = 1 - 2 x_i."""
    bits = tuple(int(v) for v in x)
    if any(b not in (0, 1) for b in bits):
        raise UsageError(f"bits must be 0 or 1, got {bits}")
    return SpinConfig(tuple(1 - 2 * b for b in bits))


@dataclass(frozen=True)
class HuboCoefficients:
    """Sparse one-, two-, and three-body Ising coefficients.

    ``j_terms`` and ``k_terms`` are keyed by strictly increasing index
    tuples. ``weights`` and ``penalty_params`` record how the instance was
    built; they do not affect energy evaluation.
    """

    n: int
    h: np.ndarray
    j_terms: dict[tuple[int, int], float]
    k_terms: dict[tuple[int, int, int], float]
    constant: float = 0.0
    weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    penalty_params: tuple[float, float, float] = (0.0, 1.0, 1.0)
    penalty_applied: bool = False
    pair_keys: tuple[tuple[int, int], ...] = field(init=False, repr=False)
    triple_keys: tuple[tuple[int, int, int], ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.h.shape != (self.n,):
            raise UsageError(f"h must have shape ({self.n},), got {self.h.shape}")
        self.h.setflags(write=False)
        for i, j in self.j_terms:
            if not 0 <= i < j < self.n:
                raise UsageError(f"bad pair key ({i}, {j}) for n={self.n}")
        for i, j, k in self.k_terms:
            if not 0 <= i < j < k < self.n:
                raise UsageError(f"bad triple key ({i}, {j}, {k}) for n={self.n}")
        object.__setattr__(self, "pair_keys", tuple(sorted(self.j_terms)))
        object.__setattr__(self, "triple_keys", tuple(sorted(self.k_terms)))

    def max_abs_coefficient(self) -> float:
        """Largest |h|, |J|, or |K| (the constant does not affect dynamics)."""
        vals = [abs(float(v)) for v in self.h]
        vals.extend(abs(v) for v in self.j_terms.values())
        vals.extend(abs(v) for v in self.k_terms.values())
        return max(vals, default=0.0)


def preselect_top_k(relevance, k: int) -> list[int]:
    """Indices of the k largest relevance values, ties to the smaller index."""
    rel = np.asarray(relevance, dtype=np.float64)
    n = rel.shape[0]
    if not 1 <= k <= n:
        raise UsageError(f"k must be in [1, {n}], got {k}")
    ranked = sorted(range(n), key=lambda i: (-rel[i], i))
    return sorted(ranked[:k])


def normalize_global(t: MiTensors) -> MiTensors:
    """One min-max transform shared by all three MI families.

    If every stored value is identical the result is all zeros and a
    :class:`DegenerateNormalizationWarning` is emitted.
    """
    values = t.all_values()
    if values.size == 0:
        raise DataError("cannot normalize empty tensors")
    lo = float(values.min())
    hi = float(values.max())
    if hi == lo:
        warnings.warn(
            "all MI values are equal; normalized tensors are all zero",
            DegenerateNormalizationWarning,
            stacklevel=2,
        )
        scale = lambda v: 0.0  # noqa: E731
    else:
        span = hi - lo
        scale = lambda v: (v - lo) / span  # noqa: E731
    return MiTensors(
        relevance=np.array([scale(float(v)) for v in t.relevance]),
        redundancy={key: scale(v) for key, v in t.redundancy.items()},
        triadic={key: scale(v) for key, v in t.triadic.items()},
    )


def build_coefficients(
    t_norm: MiTensors, w1: float, w2: float, w3: float
) -> HuboCoefficients:
    """h_i = w1*rel_i, J_ij = w2*red_ij, K_ijk = -w3*tri_ijk, constant 0."""
    if w1 <= 0 or w2 <= 0 or w3 <= 0:
        raise UsageError(f"weights must be positive, got ({w1}, {w2}, {w3})")
    values = t_norm.all_values()
    if values.size and (values.min() < 0.0 or values.max() > 1.0):
        raise UsageError("tensors must be globally normalized to [0, 1] before building")
    return HuboCoefficients(
        n=t_norm.n,
        h=np.array([w1 * float(v) for v in t_norm.relevance]),
        j_terms={key: w2 * v for key, v in t_norm.redundancy.items()},
        k_terms={key: -w3 * v for key, v in t_norm.triadic.items()},
        constant=0.0,
        weights=(w1, w2, w3),
    )


def _hinge_power(ratio: float, p: float) -> float:
    if p == 2.0:
        return ratio * ratio
    if float(p).is_integer():
        return ratio ** int(p)
    return ratio**p


def hinge_delta(c_i: float, lam: float, tau: float, p: float) -> float:
    """Penalty shift for one feature: -lam*((tau-c)/tau)^p below tau, else 0."""
    if c_i >= tau:
        return 0.0
    return -lam * _hinge_power((tau - c_i) / tau, p)


def apply_penalty(
    c: HuboCoefficients, relevance_norm, lam: float, tau: float, p: float
) -> HuboCoefficients:
    """Add the low-relevance hinge penalty to the one-body terms.

    ``relevance_norm`` must be the globally normalized relevance values (the
    same ones the builder scaled by w1). Two- and three-body terms and the
    constant are untouched.
    """
    if c.penalty_applied:
        raise UsageError("penalty already applied to these coefficients")
    if lam < 0:
        raise UsageError(f"lambda must be >= 0, got {lam}")
    if not 0.0 < tau <= 1.0:
        raise UsageError(f"tau must be in (0, 1], got {tau}")
    if p < 1:
        raise UsageError(f"p must be >= 1, got {p}")
    rel = np.asarray(relevance_norm, dtype=np.float64)
    if rel.shape != (c.n,):
        raise UsageError(f"relevance must have shape ({c.n},), got {rel.shape}")
    if rel.size and (rel.min() < 0.0 or rel.max() > 1.0):
        raise UsageError("relevance values must lie in [0, 1]")
    h_new = np.array([float(c.h[i]) + hinge_delta(float(rel[i]), lam, tau, p) for i in range(c.n)])
    return HuboCoefficients(
        n=c.n,
        h=h_new,
        j_terms=dict(c.j_terms),
        k_terms=dict(c.k_terms),
        constant=c.constant,
        weights=c.weights,
        penalty_params=(lam, tau, p),
        penalty_applied=True,
    )


def energy(c: HuboCoefficients, z) -> float:
    """Exact energy of one configuration (terms in ascending tuple order)."""
    spins = z.spins if isinstance(z, SpinConfig) else tuple(int(s) for s in z)
    if len(spins) != c.n:
        raise UsageError(f"configuration has {len(spins)} spins, model has {c.n}")
    acc = 0.0
    for i in range(c.n):
        acc += float(c.h[i]) * spins[i]
    for key in c.pair_keys:
        acc += c.j_terms[key] * (spins[key[0]] * spins[key[1]])
    for key in c.triple_keys:
        acc += c.k_terms[key] * (spins[key[0]] * spins[key[1]] * spins[key[2]])
    return acc + c.constant


def energy_many(c: HuboCoefficients, spins: np.ndarray) -> np.ndarray:
    """Energies of a (S, n) matrix of spin rows; bitwise equal to :func:`energy` per row."""
    spins = np.asarray(spins)
    if spins.ndim != 2 or spins.shape[1] != c.n:
        raise UsageError(f"spin matrix must be (S, {c.n}), got {spins.shape}")
    acc = np.zeros(spins.shape[0], dtype=np.float64)
    for i in range(c.n):
        acc += float(c.h[i]) * spins[:, i]
    for i, j in c.pair_keys:
        acc += c.j_terms[(i, j)] * (spins[:, i] * spins[:, j])
    for i, j, k in c.triple_keys:
        acc += c.k_terms[(i, j, k)] * (spins[:, i] * spins[:, j] * spins[:, k])
    return acc + c.constant


def energies_all_states(c: HuboCoefficients) -> np.ndarray:
    """Energy of every configuration, indexed by the integer x-bitstring.

    State s encodes x_i as bit (n-1-i) of s (feature 0 is the most
    significant bit), matching the statevector basis ordering.
    """
    n = c.n
    if n > 24:
        raise UsageError(f"all-states enumeration capped at n=24, got n={n}")
    size = 1 << n
    states = np.arange(size, dtype=np.int64)

    cache: dict[int, np.ndarray] = {}

    def zcol(i: int) -> np.ndarray:
        if i not in cache:
            col = (1 - 2 * ((states >> (n - 1 - i)) & 1)).astype(np.int8)
            if n <= 20:
                cache[i] = col
            else:
                return col
        return cache[i]

    acc = np.zeros(size, dtype=np.float64)
    for i in range(n):
        acc += float(c.h[i]) * zcol(i)
    for i, j in c.pair_keys:
        acc += c.j_terms[(i, j)] * (zcol(i) * zcol(j))
    for i, j, k in c.triple_keys:
        acc += c.k_terms[(i, j, k)] * (zcol(i) * zcol(j) * zcol(k))
    return acc + c.constant


def state_index_to_spins(s: int, n: int) -> SpinConfig:
    """Inverse of the x-bitstring state encoding used by :func:`energies_all_states`."""
    return SpinConfig(tuple(1 - 2 * ((s >> (n - 1 - i)) & 1) for i in range(n)))


def save_coefficients(
    path,
    c: HuboCoefficients,
    feature_names: tuple[str, ...] | None = None,
    source_indices: tuple[int, ...] | None = None,
    provenance: dict | None = None,
) -> None:
    """Write the coefficient artifact (the build -> sample stage contract)."""
    doc = {
        "schema": COEFF_SCHEMA,
        "n": c.n,
        "h": [float(v) for v in c.h],
        "J": [[i, j, c.j_terms[(i, j)]] for i, j in c.pair_keys],
        "K": [[i, j, k, c.k_terms[(i, j, k)]] for i, j, k in c.triple_keys],
        "constant": c.constant,
        "weights": {"w1": c.weights[0], "w2": c.weights[1], "w3": c.weights[2]},
        "penalty": {
            "lambda": c.penalty_params[0],
            "tau": c.penalty_params[1],
            "p": c.penalty_params[2],
            "applied": c.penalty_applied,
        },
    }
    if feature_names is not None:
        doc["feature_names"] = list(feature_names)
    if source_indices is not None:
        doc["source_indices"] = [int(i) for i in source_indices]
    if provenance is not None:
        doc["provenance"] = provenance
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_coefficients(path) -> tuple[HuboCoefficients, dict]:
    """Read a coefficient artifact; returns (coefficients, extras).

    ``extras`` carries feature_names / source_indices / provenance when the
    file has them.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read coefficient file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"malformed coefficient file {path!r}: {exc}") from exc
    if doc.get("schema") != COEFF_SCHEMA:
        raise DataError(f"unknown coefficient schema {doc.get('schema')!r} in {path!r}")
    pen = doc["penalty"]
    coeffs = HuboCoefficients(
        n=int(doc["n"]),
        h=np.array(doc["h"], dtype=np.float64),
        j_terms={(int(i), int(j)): float(v) for i, j, v in doc["J"]},
        k_terms={(int(i), int(j), int(k)): float(v) for i, j, k, v in doc["K"]},
        constant=float(doc["constant"]),
        weights=(doc["weights"]["w1"], doc["weights"]["w2"], doc["weights"]["w3"]),
        penalty_params=(pen["lambda"], pen["tau"], pen["p"]),
        penalty_applied=bool(pen["applied"]),
    )
    extras = {
        key: doc[key] for key in ("feature_names", "source_indices", "provenance") if key in doc
    }
    return coeffs, extras
