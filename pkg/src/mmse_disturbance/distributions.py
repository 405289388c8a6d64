"""Scalar channel inputs: Gaussian, finitely supported, and mixed."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_ATOMS = 64
PROB_TOL = 1e-12
POWER_TOL = 1e-9


@dataclass(frozen=True)
class Gaussian:
    variance: float = 1.0

    def __post_init__(self):
        if not self.variance >= 0:
            raise ValueError("Gaussian variance must be nonnegative")

    def mean(self) -> float:
        return 0.0

    def second_moment(self) -> float:
        return float(self.variance)

    def fourth_moment(self) -> float:
        return 3.0 * self.variance**2

    def var(self) -> float:
        return float(self.variance)

    def is_power_constrained(self) -> bool:
        return self.second_moment() <= 1 + POWER_TOL


@dataclass(frozen=True, eq=False)
class Discrete:
    """Finitely supported input with strictly increasing atoms."""

    atoms: np.ndarray
    probs: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=float).reshape(-1)
        probs = np.array(self.probs, dtype=float).reshape(-1)
        if atoms.size == 0:
            raise ValueError("a discrete input needs at least one atom")
        if atoms.size > MAX_ATOMS:
            raise ValueError(f"at most {MAX_ATOMS} atoms are supported, got {atoms.size}")
        if atoms.shape != probs.shape:
            raise ValueError("atoms and probs must have the same length")
        if not np.all(np.isfinite(atoms)):
            raise ValueError("atoms must be finite")
        if np.any(np.diff(atoms) <= 0):
            raise ValueError("atoms must be strictly increasing")
        if np.any(probs <= 0):
            raise ValueError("probabilities must be strictly positive")
        if abs(probs.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        atoms.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)

    def __eq__(self, other):
        if not isinstance(other, Discrete):
            return NotImplemented
        return np.array_equal(self.atoms, other.atoms) and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash((self.atoms.tobytes(), self.probs.tobytes()))

    @property
    def size(self) -> int:
        return self.atoms.size

    def moment(self, k: int) -> float:
        return float(self.probs @ self.atoms**k)

    def mean(self) -> float:
        return self.moment(1)

    def second_moment(self) -> float:
        return self.moment(2)

    def fourth_moment(self) -> float:
        return self.moment(4)

    def var(self) -> float:
        mu = self.mean()
        return float(self.probs @ (self.atoms - mu) ** 2)

    def entropy(self) -> float:
        return float(-(self.probs @ np.log(self.probs)))

    @property
    def d_min(self) -> float:
        """Smallest gap between atoms (0 for a single atom)."""
        return float(np.diff(self.atoms).min()) if self.size > 1 else 0.0

    @property
    def d_max(self) -> float:
        return float(self.atoms[-1] - self.atoms[0])

    def nearest_distances(self) -> np.ndarray:
        """Distance from every atom to its closest neighbour."""
        if self.size == 1:
            return np.zeros(1)
        gaps = np.diff(self.atoms)
        left = np.concatenate(([np.inf], gaps))
        right = np.concatenate((gaps, [np.inf]))
        return np.minimum(left, right)

    def scaled(self, c: float) -> "Discrete":
        if not c > 0:
            raise ValueError("scale must be positive")
        return Discrete(c * self.atoms, self.probs, name=self.name)

    def is_power_constrained(self) -> bool:
        return self.second_moment() <= 1 + POWER_TOL


@dataclass(frozen=True)
class Mixed:
    """``sqrt(1 - delta) X_D + sqrt(delta) X_G`` with ``X_G ~ N(0, 1)`` independent."""

    delta: float
    discrete: Discrete

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [0, 1]")
        if not isinstance(self.discrete, Discrete):
            raise TypeError("the discrete part of a mixed input must be Discrete")

    def mean(self) -> float:
        return np.sqrt(1 - self.delta) * self.discrete.mean()

    def second_moment(self) -> float:
        return (1 - self.delta) * self.discrete.second_moment() + self.delta

    def fourth_moment(self) -> float:
        d = self.delta
        return (
            (1 - d) ** 2 * self.discrete.fourth_moment()
            + 6 * (1 - d) * d * self.discrete.second_moment()
            + 3 * d**2
        )

    def var(self) -> float:
        return self.second_moment() - self.mean() ** 2

    def is_power_constrained(self) -> bool:
        return self.second_moment() <= 1 + POWER_TOL


InputDistribution = Gaussian | Discrete | Mixed


def discrete(atoms, probs, name: str = "") -> Discrete:
    """Build a :class:`Discrete` from unsorted pairs, merging repeated atoms."""
    atoms = np.asarray(atoms, dtype=float).reshape(-1)
    probs = np.asarray(probs, dtype=float).reshape(-1)
    if atoms.shape != probs.shape:
        raise ValueError("atoms and probs must have the same length")
    keep = probs > 0
    atoms, probs = atoms[keep], probs[keep]
    uniq, inv = np.unique(atoms, return_inverse=True)
    merged = np.bincount(inv, weights=probs, minlength=uniq.size)
    return Discrete(uniq, merged / merged.sum(), name=name)
