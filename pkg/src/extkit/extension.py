"""Extension of a Hamiltonian system by one canonical degree of freedom.

Starting from a system with Hamiltonian L on a Poisson manifold and a
seed function G solving

    X_L^2 G = -2 (c L + c0) G,      (c, c0) != (0, 0),

the extended Hamiltonian on (u, p_u, x) is

    H = p_u^2 / 2 - k^2 y'(u) L + k^2 c0 y(u)^2 + omega / y(u)^2,

where y solves y' + c y^2 + C = 0 and k = m/n is a rational constant.
H admits an extra first integral built from powers of the shift
operator U = p_u + (m/n^2) y X_L applied to members of the seed chain

    G_1 = G,   G_{i+1} = X_L(G) G_i + (1/i) G X_L(G_i),

namely K = U^m(G_n) when omega = 0 and, for omega != 0 and even first
index, a binomial combination of even operator powers.  Odd first index
with omega != 0 is handled by doubling both indices, which leaves k and
hence H unchanged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb
from typing import Callable

import numpy as np

from .jets import ScalarField
from .poisson import HamiltonianSystem, PoissonStructure, extend_structure
from .riccati import _POLE_TOL, PoleError, RiccatiParams, riccati_eval

__all__ = [
    "ExtensionBuildError",
    "ExtensionParams",
    "ExtensionSeed",
    "ExtendedState",
    "DerivPair",
    "seed_pair",
    "recursion_term",
    "recursion_term_closed",
    "power_coeffs",
    "profile_at",
    "extended_hamiltonian",
    "extended_flow",
    "char_first_integral",
    "Extension",
    "build_extension",
]


class ExtensionBuildError(Exception):
    """The requested extension is not well formed."""


@dataclass(frozen=True)
class ExtensionParams:
    """Constants defining one extension.

    ``c`` and ``c0`` enter the defining equation of the seed, ``C`` is
    the inhomogeneity of the profile equation y' + c y^2 + C = 0,
    ``m``/``n`` fix the coupling ratio k = m/n, and ``omega`` adds the
    centrifugal term omega / y^2.  ``offset`` shifts the profile origin
    in u.
    """

    c: float
    c0: float
    C: float
    m: int
    n: int
    omega: float = 0.0
    offset: float = 0.0

    def __post_init__(self):
        if self.c == 0.0 and self.c0 == 0.0:
            raise ValueError("extension constants c and c0 must not both vanish")
        for name in ("c", "c0", "C", "omega", "offset"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValueError(f"extension parameter {name} must be a finite real number")
        for name in ("m", "n"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"index {name} must be a positive integer")
        if self.c == 0.0 and self.C == 0.0 and self.omega != 0.0:
            raise ValueError("omega != 0 needs a profile that is not identically zero")

    @property
    def k(self) -> float:
        return self.m / self.n


def profile_at(params: ExtensionParams, u: float) -> tuple[float, float, float]:
    """Profile value, slope and curvature at ``u``.

    The degenerate pair (c, C) = (0, 0) has the identically-zero
    profile; otherwise this is the closed-form Riccati solution.
    """
    if params.c == 0.0 and params.C == 0.0:
        return 0.0, 0.0, 0.0
    return riccati_eval(RiccatiParams(params.c, params.C, params.offset), u)


@dataclass
class ExtensionSeed:
    """A seed function together with the (c, c0) regime it solves.

    ``supports`` answers whether the defining equation holds for a
    given constant pair.  ``verified`` records the outcome of an
    instantiation-time residual gate where one is run (None means the
    gate was not run).
    """

    field: ScalarField
    supports: Callable[[float, float], bool]
    label: str = ""
    is_null: bool = False
    verified: bool | None = None
    meta: dict = field(default_factory=dict)


@dataclass
class ExtendedState:
    """A point (u, p_u, base coordinates) of the extended manifold."""

    u: float
    p_u: float
    base: np.ndarray

    def __post_init__(self):
        self.base = np.asarray(self.base, dtype=float)

    @classmethod
    def from_vector(cls, vec) -> "ExtendedState":
        vec = np.asarray(vec, dtype=float)
        return cls(u=float(vec[0]), p_u=float(vec[1]), base=vec[2:].copy())

    def vector(self) -> np.ndarray:
        out = np.empty(2 + len(self.base))
        out[0] = self.u
        out[1] = self.p_u
        out[2:] = self.base
        return out


class DerivPair:
    """A function value paired with its image under a fixed derivation.

    Sums and Leibniz products keep both slots consistent, so polynomial
    expressions in pairs carry exact first derivatives.
    """

    __slots__ = ("value", "xl")

    def __init__(self, value, xl):
        self.value = value
        self.xl = xl

    def __repr__(self):
        return f"DerivPair({self.value!r}, {self.xl!r})"

    def __add__(self, o):
        if isinstance(o, DerivPair):
            return DerivPair(self.value + o.value, self.xl + o.xl)
        return NotImplemented

    def __sub__(self, o):
        if isinstance(o, DerivPair):
            return DerivPair(self.value - o.value, self.xl - o.xl)
        return NotImplemented

    def __neg__(self):
        return DerivPair(-self.value, -self.xl)

    def __mul__(self, o):
        if isinstance(o, DerivPair):
            return DerivPair(self.value * o.value, self.xl * o.value + self.value * o.xl)
        if isinstance(o, (int, float, complex)):
            return DerivPair(self.value * o, self.xl * o)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("DerivPair powers must be nonnegative integers")
        out = DerivPair(1.0, 0.0)
        for _ in range(n):
            out = out * self
        return out


def seed_pair(system: HamiltonianSystem, seed_field: ScalarField, x) -> tuple[DerivPair, float]:
    """(G, X_L G) as a pair at ``x``, plus the value of L there."""
    jl = system.hamiltonian.jet1(x)
    jg = seed_field.jet1(x)
    v = system.structure.matrix(x) @ jl.grad
    return DerivPair(jg.value, jg.grad @ v), jl.value


def _stream_mul(a: list, b: list) -> list:
    # Leibniz convolution of truncated derivative streams.
    order = min(len(a), len(b))
    out = []
    for k in range(order):
        acc = 0.0
        for i in range(k + 1):
            acc += comb(k, i) * a[i] * b[k - i]
        out.append(acc)
    return out


def _check_index(n: int):
    if not isinstance(n, int) or n < 1:
        raise ValueError("chain index must be a positive integer")


def recursion_term(n: int, pair: DerivPair, lam) -> DerivPair:
    """n-th member of the seed chain, evaluated by direct recursion.

    Works on truncated streams of successive derivation images, closed
    under the two rules D(G) = X_L G and D(X_L G) = -2 lam G.  Returns
    the value and first derivative of the chain member; agreement with
    :func:`recursion_term_closed` is part of the test surface.
    """
    _check_index(n)
    w = -2.0 * lam
    g_ext = []
    for i in range(n + 2):
        base = pair.value if i % 2 == 0 else pair.xl
        g_ext.append(w ** (i // 2) * base)
    g_stream = g_ext[: n + 1]
    xg_stream = g_ext[1 : n + 2]
    cur = list(g_stream)
    for i in range(1, n):
        a = _stream_mul(xg_stream, cur)
        b = _stream_mul(g_stream, cur[1:])
        cur = [a[k] + b[k] / i for k in range(len(b))]
    return DerivPair(cur[0], cur[1])


def recursion_term_closed(n: int, pair: DerivPair, lam) -> DerivPair:
    """n-th member of the seed chain in closed form.

    G_n = sum_k binom(n, 2k+1) (-2 lam)^k G^(2k+1) (X_L G)^(n-2k-1).
    """
    _check_index(n)
    xg = DerivPair(pair.xl, -2.0 * lam * pair.value)
    total = None
    for k in range((n - 1) // 2 + 1):
        term = comb(n, 2 * k + 1) * (-2.0 * lam) ** k * pair ** (2 * k + 1) * xg ** (n - 2 * k - 1)
        total = term if total is None else total + term
    return total


def power_coeffs(m: int, n: int, r: int, p_u: float, gam: float, lam) -> tuple:
    """Coefficients (P, D) with U_{m,n}^r (G_n) = P G_n + D X_L(G_n).

    U_{m,n} = p_u + (m/n^2) gam X_L, and the closed form follows from
    X_L^2(G_n) = -2 n^2 lam G_n:

      P = sum_j binom(r, 2j)   (m gam/n)^(2j)   p_u^(r-2j)   (-2 lam)^j
      D = sum_j binom(r, 2j+1) (m gam/n)^(2j+1) p_u^(r-2j-1) (-2 lam)^j / n
    """
    _check_index(m)
    _check_index(n)
    if not isinstance(r, int) or r < 0:
        raise ValueError("operator power must be a nonnegative integer")
    if r > m:
        raise ValueError(f"operator power r = {r} exceeds the first index m = {m}")
    kg = m * gam / n
    w = -2.0 * lam
    p_total = 0.0
    for j in range(r // 2 + 1):
        p_total += comb(r, 2 * j) * kg ** (2 * j) * p_u ** (r - 2 * j) * w**j
    d_total = 0.0
    for j in range((r - 1) // 2 + 1):
        d_total += comb(r, 2 * j + 1) * kg ** (2 * j + 1) * p_u ** (r - 2 * j - 1) * w**j
    return p_total, d_total / n


def extended_hamiltonian(system: HamiltonianSystem, params: ExtensionParams,
                         state: ExtendedState) -> float:
    """H = p_u^2/2 - k^2 y' L + k^2 c0 y^2 + omega / y^2 at ``state``."""
    gam, dgam, _ = profile_at(params, state.u)
    lval = system.hamiltonian.value(state.base)
    k2 = params.k**2
    h = 0.5 * state.p_u**2 - k2 * dgam * lval + k2 * params.c0 * gam * gam
    if params.omega != 0.0:
        if abs(gam) <= _POLE_TOL:
            raise PoleError("centrifugal term omega / y^2 evaluated where y = 0")
        h += params.omega / gam**2
    return h


def extended_flow(system: HamiltonianSystem, params: ExtensionParams
                  ) -> Callable[[np.ndarray], np.ndarray]:
    """Right-hand side of Hamilton's equations for the extended system.

    Acts on flat vectors (u, p_u, x); the base block is the rescaled
    base field -k^2 y'(u) pi grad L.
    """
    k2 = params.k**2
    struct = system.structure
    ham = system.hamiltonian
    c0 = params.c0
    omega = params.omega

    def rhs(vec: np.ndarray) -> np.ndarray:
        u = float(vec[0])
        x = vec[2:]
        gam, dgam, ddgam = profile_at(params, u)
        jl = ham.jet1(x)
        dpu = k2 * ddgam * jl.value - 2.0 * k2 * c0 * gam * dgam
        if omega != 0.0:
            if abs(gam) <= _POLE_TOL:
                raise PoleError("extended flow with omega != 0 reached y = 0")
            dpu += 2.0 * omega * dgam / gam**3
        out = np.empty(vec.shape)
        out[0] = vec[1]
        out[1] = dpu
        out[2:] = (-k2 * dgam) * (struct.matrix(x) @ jl.grad)
        return out

    return rhs


def char_first_integral(system: HamiltonianSystem, seed: ExtensionSeed,
                        params: ExtensionParams, state: ExtendedState):
    """The characteristic first integral of the extension at ``state``.

    For omega = 0 this is U_{m,n}^m (G_n).  For omega != 0 the even-index
    combination sum_j binom(s,j) (2 omega/y^2)^j U_{2s,r}^{2(s-j)} (G_r)
    is used, with (s, r) = (m/2, n) for even m and (m, 2n) for odd m.
    """
    pair, lval = seed_pair(system, seed.field, state.base)
    lam = params.c * lval + params.c0
    gam, _, _ = profile_at(params, state.u)
    if params.omega == 0.0:
        chain = recursion_term_closed(params.n, pair, lam)
        p_c, d_c = power_coeffs(params.m, params.n, params.m, state.p_u, gam, lam)
        return p_c * chain.value + d_c * chain.xl
    if abs(gam) <= _POLE_TOL:
        raise PoleError("first integral with omega != 0 evaluated where y = 0")
    if params.m % 2 == 0:
        s, r = params.m // 2, params.n
    else:
        s, r = params.m, 2 * params.n
    chain = recursion_term_closed(r, pair, lam)
    w = 2.0 * params.omega / gam**2
    total = 0.0
    for j in range(s + 1):
        p_c, d_c = power_coeffs(2 * s, r, 2 * (s - j), state.p_u, gam, lam)
        total = total + comb(s, j) * w**j * (p_c * chain.value + d_c * chain.xl)
    return total


@dataclass
class Extension:
    """A built extension: system, seed and constants, ready to evaluate."""

    system: HamiltonianSystem
    seed: ExtensionSeed
    params: ExtensionParams

    def hamiltonian(self, state: ExtendedState) -> float:
        return extended_hamiltonian(self.system, self.params, state)

    def integral(self, state: ExtendedState):
        return char_first_integral(self.system, self.seed, self.params, state)

    def flow(self) -> Callable[[np.ndarray], np.ndarray]:
        return extended_flow(self.system, self.params)

    def structure(self) -> PoissonStructure:
        return extend_structure(self.system.structure)

    def hamiltonian_of_vector(self, vec) -> float:
        return self.hamiltonian(ExtendedState.from_vector(vec))

    def integral_of_vector(self, vec):
        return self.integral(ExtendedState.from_vector(vec))

    def conserved_quantities(self) -> dict[str, Callable[[np.ndarray], float]]:
        """Observables over flat extended vectors, for drift reports.

        Complex-valued integrals are split into real and imaginary
        parts so every observable is real.
        """
        ham = self.system.hamiltonian
        out: dict[str, Callable[[np.ndarray], float]] = {
            "H": self.hamiltonian_of_vector,
            "L": lambda vec: ham.value(vec[2:]),
        }
        if self.seed.field.codomain == "complex":
            out["K_re"] = lambda vec: complex(self.integral_of_vector(vec)).real
            out["K_im"] = lambda vec: complex(self.integral_of_vector(vec)).imag
        else:
            out["K"] = lambda vec: float(self.integral_of_vector(vec))
        return out


def build_extension(system: HamiltonianSystem, seed: ExtensionSeed,
                    params: ExtensionParams) -> Extension:
    """Validate compatibility and assemble an :class:`Extension`.

    Rejects identically-zero seeds and constant pairs (c, c0) outside
    the regime the seed solves.
    """
    if seed.field.dim != system.dim:
        raise ExtensionBuildError("seed dimension does not match the system")
    if seed.is_null:
        raise ExtensionBuildError("seed is identically zero; the extension is degenerate")
    if not seed.supports(params.c, params.c0):
        raise ExtensionBuildError(
            f"seed {seed.label or ''} does not solve the defining equation "
            f"for (c, c0) = ({params.c}, {params.c0})"
        )
    return Extension(system=system, seed=seed, params=params)
