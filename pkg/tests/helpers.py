"""Shared generators and independent oracles for the test suite.

The oracles here deliberately re-derive results by brute force (permutation
sums, path enumeration) so they stay independent of the library code paths
they are used to check.
"""

from __future__ import annotations

import random
from itertools import permutations

from readkdet.field import FieldSpec
from readkdet.poly import Polynomial
from readkdet.symmat import SymbolicMatrix, Var
from readkdet.transform import ABP


def random_value(spec: FieldSpec, rng: random.Random, lo: int = -3, hi: int = 3):
    if spec.tag == "Fp":
        return spec.from_int(rng.randrange(spec.p))
    if spec.tag == "Q":
        return spec.from_int(rng.randint(lo, hi))
    return spec.eisenstein(rng.randint(lo, hi), rng.randint(lo, hi))


def random_read_k_matrix(
    rng: random.Random, spec: FieldSpec, size: int, nvars: int, k: int
) -> SymbolicMatrix:
    """Random matrix with every variable placed between 1 and k times."""
    cells = [(i, j) for i in range(size) for j in range(size)]
    rng.shuffle(cells)
    grid = [[random_value(spec, rng) for _ in range(size)] for _ in range(size)]
    used = 0
    for v in range(1, nvars + 1):
        for _ in range(rng.randint(1, k)):
            if used >= len(cells):
                break
            i, j = cells[used]
            used += 1
            grid[i][j] = Var(v)
    return SymbolicMatrix(spec, nvars, grid)


def random_read_once_matrix(
    rng: random.Random, spec: FieldSpec, size: int, nvars: int
) -> SymbolicMatrix:
    return random_read_k_matrix(rng, spec, size, nvars, 1)


def naive_permanent(entries):
    """Independent permanent oracle: literal permutation sum."""
    n = len(entries)
    spec = entries[0][0].spec
    total = spec.zero()
    for sigma in permutations(range(n)):
        prod = spec.one()
        for i in range(n):
            prod = prod * entries[i][sigma[i]]
        total = total + prod
    return total


def enumerate_path_polynomial(program: ABP) -> Polynomial:
    """Independent path-polynomial oracle: explicit DFS over all paths."""
    spec, nvars = program.spec, program.nvars
    out_edges: dict[int, list] = {}
    for u, v, label in program.edges:
        out_edges.setdefault(u, []).append((v, label))
    total = Polynomial.zero(spec, nvars)
    stack = [(program.source, Polynomial.constant(spec.one(), nvars))]
    while stack:
        v, prefix = stack.pop()
        if v == program.sink:
            total = total + prefix
            continue
        for w, label in out_edges.get(v, ()):
            if isinstance(label, Var):
                piece = prefix * Polynomial.variable(label.index, nvars, spec)
            else:
                piece = prefix.scale(label)
            stack.append((w, piece))
    return total


def random_abp(rng: random.Random, spec: FieldSpec, max_edges: int = 10) -> ABP:
    """Random layered occurrence-one ABP with at most max_edges edges."""
    n_layers = rng.randint(2, 4)
    vertices = {}
    layers: list[list[int]] = []
    vid = 0
    for layer in range(n_layers):
        count = 1 if layer in (0, n_layers - 1) else rng.randint(1, 3)
        ids = []
        for _ in range(count):
            vertices[vid] = layer
            ids.append(vid)
            vid += 1
        layers.append(ids)
    edges = []
    next_var = 1
    seen = set()
    budget = rng.randint(n_layers - 1, max_edges)
    attempts = 0
    while len(edges) < budget and attempts < 50:
        attempts += 1
        layer = rng.randrange(n_layers - 1)
        u = rng.choice(layers[layer])
        v = rng.choice(layers[layer + 1])
        if (u, v) in seen:
            continue
        seen.add((u, v))
        if rng.random() < 0.6:
            label = Var(next_var)
            next_var += 1
        else:
            label = random_value(spec, rng)
        edges.append((u, v, label))
    return ABP(spec, max(1, next_var - 1), vertices, edges, layers[0][0], layers[-1][0])
