from itertools import combinations

import numpy as np
import pytest

from coverdp.hitting import (
    FamilyHittingSolver,
    greedy_hitting_set_size,
    minimum_hitting_set_size,
)


def brute_force_minimum(masks, n_bits):
    for r in range(n_bits + 1):
        for combo in combinations(range(n_bits), r):
            chosen = 0
            for e in combo:
                chosen |= 1 << e
            if all(m & chosen for m in masks):
                return r
    raise AssertionError("unhittable family")


def test_empty_family_needs_nothing():
    assert minimum_hitting_set_size([]) == 0


def test_single_set_needs_one():
    assert minimum_hitting_set_size([0b1010]) == 1


def test_disjoint_sets_need_one_each():
    masks = [0b000011, 0b001100, 0b110000]
    assert minimum_hitting_set_size(masks) == 3


def test_shared_element_suffices():
    masks = [0b0011, 0b0101, 0b1001]  # all contain bit 0
    assert minimum_hitting_set_size(masks) == 1


def test_empty_set_rejected():
    with pytest.raises(ValueError):
        minimum_hitting_set_size([0b101, 0])


def test_matches_brute_force_on_random_families():
    gen = np.random.Generator(np.random.PCG64(2024))
    for _ in range(300):
        n_bits = int(gen.integers(2, 9))
        n_sets = int(gen.integers(1, 10))
        masks = []
        for _ in range(n_sets):
            width = int(gen.integers(1, n_bits + 1))
            bits = gen.choice(n_bits, size=width, replace=False)
            masks.append(sum(1 << int(b) for b in bits))
        expected = brute_force_minimum(masks, n_bits)
        assert minimum_hitting_set_size(masks) == expected
        assert greedy_hitting_set_size(masks) >= expected


def test_complete_pair_family_is_vertex_cover():
    # every pair over v vertices: the optimum leaves exactly one vertex out
    for v in [4, 6, 9]:
        masks = [(1 << a) | (1 << b) for a, b in combinations(range(v), 2)]
        assert minimum_hitting_set_size(masks) == v - 1


def test_chunk_structure_collapses():
    # pairs of chunks: hitting any element of a chunk hits all its pairs
    chunk, v = 10, 8
    def chunk_mask(c):
        m = 0
        for i in range(c * chunk, (c + 1) * chunk):
            m |= 1 << i
        return m
    masks = [chunk_mask(a) | chunk_mask(b) for a, b in combinations(range(v), 2)]
    assert minimum_hitting_set_size(masks) == v - 1


def test_shared_memo_answers_match_fresh_solves():
    # interleaved subfamily queries against one solver must agree with
    # independent solves of each subfamily, regardless of query order
    gen = np.random.Generator(np.random.PCG64(7))
    for _ in range(40):
        n_bits = int(gen.integers(3, 9))
        n_sets = int(gen.integers(2, 11))
        masks = []
        for _ in range(n_sets):
            width = int(gen.integers(1, n_bits + 1))
            bits = gen.choice(n_bits, size=width, replace=False)
            masks.append(sum(1 << int(b) for b in bits))
        solver = FamilyHittingSolver(masks)
        queries = [int(gen.integers(0, 1 << n_sets)) for _ in range(25)]
        queries += [(1 << n_sets) - 1, 0]
        for active in queries:
            subfamily = [masks[i] for i in range(n_sets) if active & (1 << i)]
            assert solver.size(active) == minimum_hitting_set_size(subfamily)


def test_active_mask_out_of_range_rejected():
    solver = FamilyHittingSolver([0b11, 0b101])
    with pytest.raises(ValueError):
        solver.size(0b100)
