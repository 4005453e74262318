"""Poisson structures, brackets and Hamiltonian derivative operators.

A structure is a coordinate-dependent antisymmetric bivector pi.  The
canonical kind on 2d coordinates ordered (q1..qd, p1..pd) is the block
matrix ((0, I), (-I, 0)), so {q_i, p_i} = +1.  Custom kinds supply
either a constant matrix or an entry rule over the coordinate ring.

The Hamiltonian vector field of L is v = pi grad L, the bracket is
{F, G} = grad F . pi grad G, and X_L F = {F, L}.  The second-order
operator is assembled exactly from second jets:

    X_L^2 F = v . (hess F) v + (J v) . grad F,
    J[i,k] = d_k v_i = sum_j (d_k pi_ij) (d_j L) + (pi hess L)[i,k].
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .jets import EvaluationError, Jet1, ScalarField

__all__ = [
    "PoissonStructure",
    "canonical_structure",
    "custom_structure",
    "HamiltonianSystem",
    "ham_vector_field",
    "base_flow",
    "bracket",
    "apply_xl",
    "apply_xl2",
    "extend_structure",
    "jacobi_residual",
]

_ANTISYM_TOL = 1e-14


def _canonical_block(dim: int) -> np.ndarray:
    half = dim // 2
    m = np.zeros((dim, dim))
    m[:half, half:] = np.eye(half)
    m[half:, :half] = -np.eye(half)
    return m


@dataclass
class PoissonStructure:
    """Antisymmetric bivector on ``dim`` coordinates.

    Exactly one of the canonical kind, a constant matrix, or an entry
    rule ``entries(coords) -> nested sequence`` backs the structure.
    Entry rules must accept jets so entry derivatives are available.
    """

    dim: int
    kind: str = "canonical"
    entries: Callable[[list], Any] | None = None
    const: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("canonical", "custom"):
            raise ValueError(f"unknown Poisson structure kind {self.kind!r}")
        if self.kind == "canonical":
            if self.dim % 2 != 0:
                raise ValueError("canonical structure needs an even dimension")
            if self.entries is not None or self.const is not None:
                raise ValueError("canonical structure takes no entries or matrix")
            self.const = _canonical_block(self.dim)
        elif self.entries is None and self.const is None:
            raise ValueError("custom structure needs an entry rule or a constant matrix")
        if self.const is not None:
            self.const = np.asarray(self.const, dtype=float)
            if self.const.shape != (self.dim, self.dim):
                raise ValueError("constant bivector has the wrong shape")
            self._check_antisym(self.const)
            self.const.setflags(write=False)

    @property
    def constant(self) -> bool:
        return self.const is not None

    def _check_antisym(self, m: np.ndarray):
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m + m.T)) > _ANTISYM_TOL * scale:
            raise ValueError(
                f"bivector {self.label or ''} is not antisymmetric within {_ANTISYM_TOL:g}"
            )

    def matrix(self, x) -> np.ndarray:
        """The bivector evaluated at ``x``."""
        if self.const is not None:
            return self.const
        vals = self.entries(list(np.asarray(x, dtype=float)))
        m = np.empty((self.dim, self.dim))
        for i in range(self.dim):
            for j in range(self.dim):
                e = vals[i][j]
                m[i, j] = e.value if isinstance(e, Jet1) else e
        self._check_antisym(m)
        return m

    def matrix_with_grads(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Bivector and its entry derivatives.

        Returns ``(pi, dpi)`` with ``dpi[k, i, j] = d pi_ij / d x_k``.
        """
        if self.const is not None:
            return self.const, np.zeros((self.dim, self.dim, self.dim))
        x = np.asarray(x, dtype=float)
        eye = np.eye(self.dim)
        seeds = [Jet1(v, eye[i]) for i, v in enumerate(x.tolist())]
        vals = self.entries(seeds)
        m = np.empty((self.dim, self.dim))
        dm = np.zeros((self.dim, self.dim, self.dim))
        for i in range(self.dim):
            for j in range(self.dim):
                e = vals[i][j]
                if isinstance(e, Jet1):
                    m[i, j] = e.value
                    dm[:, i, j] = e.grad
                else:
                    m[i, j] = e
        self._check_antisym(m)
        return m, dm


def canonical_structure(dim: int, label: str = "") -> PoissonStructure:
    return PoissonStructure(dim=dim, kind="canonical", label=label)


def custom_structure(
    dim: int,
    entries: Callable[[list], Any] | None = None,
    const: np.ndarray | None = None,
    label: str = "",
) -> PoissonStructure:
    return PoissonStructure(dim=dim, kind="custom", entries=entries, const=const, label=label)


@dataclass
class HamiltonianSystem:
    """A Poisson structure with a Hamiltonian and named observables."""

    structure: PoissonStructure
    hamiltonian: ScalarField
    observables: dict[str, ScalarField] = field(default_factory=dict)
    coord_names: tuple[str, ...] | None = None
    label: str = ""

    def __post_init__(self):
        if self.hamiltonian.dim != self.structure.dim:
            raise ValueError("Hamiltonian dimension does not match the structure")
        if self.coord_names is not None and len(self.coord_names) != self.structure.dim:
            raise ValueError("coordinate name count does not match the dimension")

    @property
    def dim(self) -> int:
        return self.structure.dim


def ham_vector_field(system: HamiltonianSystem, x) -> np.ndarray:
    """pi grad L at ``x``."""
    j = system.hamiltonian.jet1(x)
    return system.structure.matrix(x) @ j.grad


def base_flow(system: HamiltonianSystem) -> Callable[[np.ndarray], np.ndarray]:
    """Right-hand side ``x -> pi grad L`` for integrators."""

    def rhs(x: np.ndarray) -> np.ndarray:
        return ham_vector_field(system, x)

    return rhs


def bracket(structure: PoissonStructure, f: ScalarField, g: ScalarField, x):
    """{F, G} = grad F . pi grad G at ``x``."""
    gf = f.jet1(x).grad
    gg = g.jet1(x).grad
    return gf @ structure.matrix(x) @ gg


def apply_xl(system: HamiltonianSystem, f: ScalarField, x):
    """X_L F = {F, L} at ``x``."""
    v = ham_vector_field(system, x)
    return f.jet1(x).grad @ v


def apply_xl2(system: HamiltonianSystem, f: ScalarField, x):
    """X_L(X_L F) at ``x``, exact through second jets."""
    jl = system.hamiltonian.jet2(x)
    jf = f.jet2(x)
    pi, dpi = system.structure.matrix_with_grads(x)
    v = pi @ jl.grad
    jac = np.einsum("kij,j->ik", dpi, jl.grad) + pi @ jl.hess
    return v @ jf.hess @ v + (jac @ v) @ jf.grad


def extend_structure(structure: PoissonStructure) -> PoissonStructure:
    """Append a canonical pair ``(u, p_u)`` ahead of the base coordinates.

    The result acts on ``(u, p_u, x_1 .. x_n)`` as the direct sum of the
    2x2 block ((0, 1), (-1, 0)) and the base bivector.
    """
    n = structure.dim
    if structure.const is not None:
        big = np.zeros((n + 2, n + 2))
        big[0, 1] = 1.0
        big[1, 0] = -1.0
        big[2:, 2:] = structure.const
        return PoissonStructure(
            dim=n + 2, kind="custom", const=big,
            label=f"extended({structure.label})" if structure.label else "extended",
        )

    base_entries = structure.entries

    def entries(coords: list):
        base = base_entries(coords[2:])
        rows = [[0.0] * (n + 2) for _ in range(n + 2)]
        rows[0][1] = 1.0
        rows[1][0] = -1.0
        for i in range(n):
            for j in range(n):
                rows[i + 2][j + 2] = base[i][j]
        return rows

    return PoissonStructure(
        dim=n + 2, kind="custom", entries=entries,
        label=f"extended({structure.label})" if structure.label else "extended",
    )


def jacobi_residual(structure: PoissonStructure, x) -> float:
    """Max over index triples of the cyclic Jacobi combination.

    sum_l (pi_il d_l pi_jk + pi_jl d_l pi_ki + pi_kl d_l pi_ij) vanishes
    identically for a Poisson bivector.
    """
    pi, dpi = structure.matrix_with_grads(x)
    a = np.einsum("il,ljk->ijk", pi, dpi)
    total = a + a.transpose(1, 2, 0) + a.transpose(2, 0, 1)
    return float(np.max(np.abs(total)))
