"""Path and cycle lattices with matrix-free adjacency action.

Vertices are labelled ``0 .. n-1``. Paths and cycles are stored implicitly
as ``(kind, n)``; arbitrary symmetric 0/1 graphs can be built with
:func:`from_edges` and reuse the same dynamics.
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InvalidSizeError


class LatticeKind(enum.Enum):
    PATH = "path"
    CYCLE = "cycle"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Lattice:
    kind: LatticeKind
    n: int
    # only populated for CUSTOM lattices; (i, j) with i < j
    edge_list: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind is LatticeKind.PATH and self.n < 2:
            raise InvalidSizeError(f"path needs n >= 2, got {self.n}")
        if self.kind is LatticeKind.CYCLE and self.n < 3:
            raise InvalidSizeError(f"cycle needs n >= 3, got {self.n}")
        if self.kind is LatticeKind.CUSTOM and self.n < 1:
            raise InvalidSizeError(f"graph needs n >= 1, got {self.n}")

    @property
    def edges(self):
        """Undirected edges as sorted ``(i, j)`` pairs."""
        if self.kind is LatticeKind.PATH:
            return [(j, j + 1) for j in range(self.n - 1)]
        if self.kind is LatticeKind.CYCLE:
            return [(j, j + 1) for j in range(self.n - 1)] + [(0, self.n - 1)]
        return list(self.edge_list)

    def neighbors(self, v):
        _check_vertex(self, v)
        n = self.n
        if self.kind is LatticeKind.PATH:
            return [k for k in (v - 1, v + 1) if 0 <= k < n]
        if self.kind is LatticeKind.CYCLE:
            return sorted({(v - 1) % n, (v + 1) % n})
        return sorted({j if i == v else i for i, j in self.edge_list if v in (i, j)})

    def degrees(self):
        return np.array([degree(self, v) for v in range(self.n)])

    def adjacency_matrix(self):
        """Dense adjacency matrix; meant for oracles and small graphs."""
        A = np.zeros((self.n, self.n))
        for i, j in self.edges:
            A[i, j] = A[j, i] = 1.0
        return A

    def label(self):
        return f"{self.kind.value}:{self.n}"

    def __str__(self):
        return self.label()


def make_path(n):
    """Path graph ``P_n``: vertex j joined to j-1 and j+1."""
    return Lattice(LatticeKind.PATH, int(n))


def make_cycle(n):
    """Cycle graph ``C_n`` with the wraparound edge (0, n-1)."""
    return Lattice(LatticeKind.CYCLE, int(n))


def from_edges(n, edges):
    """Build a simple undirected graph from an edge list.

    Self-loops and repeated edges are rejected so that the adjacency matrix
    stays symmetric with entries in {0, 1} and a zero diagonal.
    """
    n = int(n)
    seen = set()
    for i, j in edges:
        i, j = int(i), int(j)
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"edge ({i}, {j}) out of range for n={n}")
        if i == j:
            raise ValueError(f"self-loop at vertex {i}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise ValueError(f"duplicate edge {key}")
        seen.add(key)
    return Lattice(LatticeKind.CUSTOM, n, tuple(sorted(seen)))


def parse_lattice(text):
    """Parse ``"path:N"`` or ``"cycle:N"``."""
    try:
        kind, size = text.strip().split(":")
        size = int(size)
    except ValueError:
        raise ValueError(f"graph must look like 'path:N' or 'cycle:N', got {text!r}") from None
    kind = kind.lower()
    if kind == "path":
        return make_path(size)
    if kind == "cycle":
        return make_cycle(size)
    raise ValueError(f"unknown graph kind {kind!r}")


def _check_vertex(lat, v):
    if not (0 <= v < lat.n):
        raise IndexError(f"vertex {v} out of range for {lat}")


def degree(lat, v):
    _check_vertex(lat, v)
    if lat.kind is LatticeKind.CYCLE:
        return 2
    if lat.kind is LatticeKind.PATH:
        return 1 if v in (0, lat.n - 1) else 2
    return len(lat.neighbors(v))


@functools.lru_cache(maxsize=64)
def _edge_arrays(lat):
    e = np.array(lat.edge_list, dtype=int).reshape(-1, 2)
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    return src, dst


def apply_adjacency(lat, psi):
    """Return ``A @ psi`` without building ``A``."""
    psi = np.asarray(psi)
    if psi.shape != (lat.n,):
        raise DimensionError(f"expected vector of length {lat.n}, got shape {psi.shape}")
    out = np.zeros_like(psi, dtype=np.result_type(psi, float))
    if lat.kind is LatticeKind.CUSTOM:
        src, dst = _edge_arrays(lat)
        np.add.at(out, dst, psi[src])
        return out
    out[1:] += psi[:-1]
    out[:-1] += psi[1:]
    if lat.kind is LatticeKind.CYCLE:
        out[0] += psi[-1]
        out[-1] += psi[0]
    return out
