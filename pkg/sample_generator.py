"""
Sample machine generator for the QFAC toolkit.

This module provides random machine factories used by the tests and the
`samples` command, and writes a small corpus of machine files for
initial experiments.
"""

import itertools
import os
from typing import List, Sequence, Set

import numpy as np

from classical_automata import Dfa, Pfa
from constructions import (BINARY, build_exact_finite_qfac, build_lhp_dfa,
                           moqfa_from_modp_params, search_modp_multipliers)
from linalg_core import random_projector, random_state, random_unitary
from logging_config import get_logger
from machine_io import save_machine
from model_validator import required_windows
from quantum_models import MmQfa, MoQfa, MultiLetterQfa, Qfac

logger = get_logger(__name__)


def _basis(dim: int) -> List[str]:
    return [f"q{i}" for i in range(dim)]


def random_moqfa(dim: int, alphabet: Sequence[str], rng: np.random.Generator) -> MoQfa:
    """MO-1QFA with Haar-random unitaries and a random nonempty accepting set."""
    basis = _basis(dim)
    count = int(rng.integers(1, dim + 1))
    accepting = set(rng.choice(basis, size=count, replace=False).tolist())
    return MoQfa(basis, alphabet, random_state(dim, rng),
                 {s: random_unitary(dim, rng) for s in alphabet}, accepting)


def random_mmqfa(dim: int, alphabet: Sequence[str], rng: np.random.Generator) -> MmQfa:
    """MM-1QFA with q0 non-halting, the last basis state accepting and the one before it rejecting."""
    if dim < 3:
        raise ValueError(f"dim must be at least 3: {dim}")
    basis = _basis(dim)
    return MmQfa(basis, alphabet, np.eye(dim)[0],
                 {s: random_unitary(dim, rng) for s in alphabet},
                 random_unitary(dim, rng), {basis[-1]}, {basis[-2]})


def random_multiletter(k: int, dim: int, alphabet: Sequence[str], rng: np.random.Generator) -> MultiLetterQfa:
    """k-letter QFA with a random unitary for every window the scan can meet."""
    basis = _basis(dim)
    unitaries = {w: random_unitary(dim, rng) for w in required_windows(k, alphabet)}
    count = int(rng.integers(1, dim + 1))
    accepting = set(rng.choice(basis, size=count, replace=False).tolist())
    return MultiLetterQfa(k, basis, alphabet, random_state(dim, rng), unitaries, accepting)


def random_reversible_qfac(n_classical: int, dim: int, alphabet: Sequence[str],
                           rng: np.random.Generator) -> Qfac:
    """
    1QFAC whose classical transition is a permutation for every symbol.

    Accept projectors are random subspaces, so they are usually not
    coordinate projectors.
    """
    states = [f"s{i}" for i in range(n_classical)]
    transitions = {s: {} for s in states}
    for symbol in alphabet:
        perm = rng.permutation(n_classical)
        for i, s in enumerate(states):
            transitions[s][symbol] = states[int(perm[i])]
    unitaries = {(s, symbol): random_unitary(dim, rng) for s in states for symbol in alphabet}
    projectors = {s: random_projector(dim, int(rng.integers(0, dim + 1)), rng) for s in states}
    return Qfac(states, _basis(dim), alphabet, states[0], random_state(dim, rng),
                transitions, unitaries, projectors)


def random_dfa(n: int, alphabet: Sequence[str], rng: np.random.Generator) -> Dfa:
    """Total DFA with uniformly random transitions and accepting set."""
    states = [f"d{i}" for i in range(n)]
    transitions = {s: {symbol: states[int(rng.integers(0, n))] for symbol in alphabet} for s in states}
    accepting = {s for s in states if rng.random() < 0.5}
    return Dfa(states, alphabet, states[0], transitions, accepting)


def random_pfa(n: int, alphabet: Sequence[str], rng: np.random.Generator) -> Pfa:
    """PFA with Dirichlet-distributed rows."""
    states = [f"r{i}" for i in range(n)]
    matrices = {s: rng.dirichlet(np.ones(n), size=n) for s in alphabet}
    accepting = {s for s in states if rng.random() < 0.5}
    return Pfa(states, alphabet, rng.dirichlet(np.ones(n)), matrices, accepting)


def random_finite_language(alphabet: Sequence[str], max_len: int, rng: np.random.Generator) -> Set[str]:
    """Random finite language containing at least one word of length max_len."""
    words = {"".join(t) for n in range(max_len + 1) for t in itertools.product(sorted(alphabet), repeat=n)}
    chosen = {w for w in sorted(words) if rng.random() < 0.3}
    longest = sorted(w for w in words if len(w) == max_len)
    chosen.add(longest[int(rng.integers(0, len(longest)))])
    return chosen


def _broken_pfa() -> Pfa:
    """PFA whose row 1 under '0' does not sum to one."""
    return Pfa(["r0", "r1"], BINARY, [1.0, 0.0],
               {"0": [[0.5, 0.5], [0.7, 0.7]], "1": [[1.0, 0.0], [0.0, 1.0]]}, {"r1"})


def generate_sample_files(base_path: str, seed: int = 7) -> bool:
    """
    Generate sample machine files in the specified directory.

    Creates a 'machines' folder with one file per model family, plus one
    machine that fails validation.

    Args:
        base_path: Base directory where 'machines' folder will be created
        seed: Seed for the random machines and the mod-p search

    Returns:
        bool: True if generation successful, False otherwise
    """
    try:
        folder = os.path.join(base_path, 'machines')
        os.makedirs(folder, exist_ok=True)
        logger.info(f"Created machines folder: {folder}")

        rng = np.random.default_rng(seed)
        params = search_modp_multipliers(5, 0.2, seed)
        samples = {
            'lhp_dfa_h1_p2.json': (build_lhp_dfa(1, 2), {'h': 1, 'p': 2}),
            'modp_p5.json': (moqfa_from_modp_params(params), {
                'p': 5, 'epsilon': 0.2, 'seed': seed,
                'rotation_multipliers': list(params.rotation_multipliers),
                'certificate': params.certificate}),
            'exact_finite_0_01.json': (build_exact_finite_qfac({"0", "01"}, BINARY), {'language': ["0", "01"]}),
            'multiletter_k2.json': (random_multiletter(2, 3, BINARY, rng), {'seed': seed}),
            'reversible_qfac.json': (random_reversible_qfac(2, 2, BINARY, rng), {'seed': seed}),
            'mm1qfa.json': (random_mmqfa(3, BINARY, rng), {'seed': seed}),
            'broken_pfa.json': (_broken_pfa(), {'note': 'row 1 of matrix 0 is not stochastic'}),
        }
        for name, (machine, metadata) in samples.items():
            save_machine(machine, os.path.join(folder, name), metadata)

        logger.info("Sample files generated successfully")
        return True

    except OSError as e:
        logger.error(f"Failed to generate sample files: {e}")
        return False
