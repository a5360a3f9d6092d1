"""Seeded random states and linear-optics circuits shared by the property tests."""
import math
from typing import Any, Sequence

import numpy as np

from cat_teleport.backends import TeleportBackend
from cat_teleport.coherent_algebra import make_superposition, normalize
from cat_teleport.states import CoherentSuperposition

Operation = tuple[str, tuple[Any, ...]]


def random_label(rng: np.random.Generator, max_modulus: float) -> complex:
    return complex(max_modulus * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform()))


def random_superposition(rng: np.random.Generator, modes: int, terms: int,
                         max_modulus: float = 1.0) -> CoherentSuperposition:
    return normalize(make_superposition(modes, [
        (complex(rng.normal(), rng.normal()), [random_label(rng, max_modulus) for _ in range(modes)])
        for _ in range(terms)
    ]))


def random_circuit(rng: np.random.Generator, modes: int, depth: int) -> list[Operation]:
    operations: list[Operation] = []
    for _ in range(depth):
        # a single mode only admits phase shifts
        kind = ("balanced", "raw", "phase")[int(rng.integers(3))] if modes > 1 else "phase"
        if kind == "phase":
            operations.append((kind, (int(rng.integers(modes)), float(rng.uniform(-math.pi, math.pi)))))
        else:
            i, j = (int(k) for k in rng.choice(modes, size=2, replace=False))
            operations.append((kind, (i, j)))
    return operations


def run_circuit[StateT](backend: TeleportBackend[StateT], state: StateT, operations: Sequence[Operation]) -> StateT:
    for kind, args in operations:
        if kind == "balanced":
            state = backend.balanced_bs(state, *args)
        elif kind == "raw":
            state = backend.raw_bs(state, *args)
        else:
            state = backend.phase_shift(state, *args)
    return state
