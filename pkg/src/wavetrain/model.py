"""Wave-frame ODE system for two-species reaction-diffusion models.

The traveling-wave substitution turns the PDE pair for prey N and
predator P into four coupled first order ODEs in the wave coordinate
zeta, with state (N, M, P, Q) where M = dN/dzeta and Q = dP/dzeta:

    N' = M
    M' = (-v M - N F(N) + alpha N P + eps_tilde N^2 / k) / D1
    P' = Q
    Q' = (-v Q + P G(P) - beta N P) / D2

F is the prey birth-rate function and G the predator death-rate
function. Five preset choices of (F, G) are provided, named A through
E, each with its stock parameter values. Parameters a preset does not
use are marked absent and reading them raises.
"""

from __future__ import annotations

import dataclasses

import numpy as np

PARAM_KEYS = ("alpha", "beta", "eps", "eps_tilde", "k", "gamma",
              "delta", "c", "d", "k0", "D1", "D2")

SYSTEM_IDS = ("A", "B", "C", "D", "E")

# presets where the logistic saturation term eps_tilde N^2/k is active;
# for these eps_tilde defaults to eps and may be overridden separately
_SATURATING = ("B", "C", "D")

_PRESET_DEFAULTS = {
    "A": dict(alpha=1.5, eps=1.0, beta=-2.75, gamma=-1.5, D1=1.25, D2=2.1),
    "B": dict(alpha=-1.2, eps=-3.0, beta=-2.0, gamma=-2.0, k=2.0,
              D1=1.0, D2=2.0),
    "C": dict(alpha=1.25, eps=1.0, beta=2.0, c=0.5, d=2.0, k=2.0, k0=2.0,
              D1=1.0, D2=-2.0),
    "D": dict(alpha=1.25, eps=1.0, beta=2.0, c=0.5, d=2.0, k=2.0, k0=2.0,
              D1=1.0, D2=-2.0),
    "E": dict(alpha=1.7, beta=-2.1, gamma=-2.0, delta=0.6, k=-2.0,
              D1=-1.0, D2=2.0),
}


class ModelError(Exception):
    pass


class ConfigError(ModelError):
    """Unknown system id, unknown key, or an override of an unused knob."""


class ParameterAbsent(ModelError):
    """Read of a parameter the chosen system does not use."""


class Params:
    """Scalar parameter bag with absence tracking.

    Attribute access returns the stored float or raises ParameterAbsent,
    so a System C analysis that accidentally reaches for gamma fails
    loudly instead of picking up a stale default.
    """

    __slots__ = ("_vals",)

    def __init__(self, **kwargs):
        vals = {}
        for key, val in kwargs.items():
            if key not in PARAM_KEYS:
                raise ConfigError(f"unknown parameter {key!r}")
            if val is not None:
                vals[key] = float(val)
        object.__setattr__(self, "_vals", vals)

    def __getattr__(self, name):
        if name in PARAM_KEYS:
            vals = object.__getattribute__(self, "_vals")
            if name not in vals:
                raise ParameterAbsent(
                    f"parameter {name!r} is not used by this system")
            return vals[name]
        raise AttributeError(name)

    def has(self, name: str) -> bool:
        return name in self._vals

    def as_dict(self) -> dict:
        return dict(self._vals)

    def __eq__(self, other):
        return isinstance(other, Params) and self._vals == other._vals

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in sorted(self._vals.items()))
        return f"Params({inner})"


@dataclasses.dataclass(frozen=True)
class ModelSpec:
    """One concrete model: a system id, its parameters, and the
    saturation coefficient eps_tilde (0 where the term is absent)."""

    system: str
    params: Params
    eps_tilde: float

    def F(self, N):
        """Prey birth-rate function at density N."""
        p = self.params
        s = self.system
        if s in ("A", "B"):
            return p.eps
        if s == "C":
            return p.k0
        if s == "D":
            return p.k0 * (1.0 + N / p.k)
        return (1.0 + p.delta * N) / (1.0 + N * N)

    def F_prime(self, N):
        p = self.params
        s = self.system
        if s in ("A", "B", "C"):
            return 0.0
        if s == "D":
            return p.k0 / p.k
        S = 1.0 + N * N
        return (p.delta * S - 2.0 * N * (1.0 + p.delta * N)) / (S * S)

    def G(self, P):
        """Predator death-rate function at density P."""
        p = self.params
        s = self.system
        if s in ("A", "B"):
            return p.gamma
        if s in ("C", "D"):
            return p.d + p.c * P
        return p.gamma * (1.0 + p.k * P * P)

    def G_prime(self, P):
        p = self.params
        s = self.system
        if s in ("A", "B"):
            return 0.0
        if s in ("C", "D"):
            return p.c
        return 2.0 * p.gamma * p.k * P

    def to_mapping(self) -> dict:
        """Flat key-value form, the round-trip partner of spec_from_mapping."""
        out = {"system": self.system}
        out.update(self.params.as_dict())
        return out


@dataclasses.dataclass(frozen=True)
class FixedPoint:
    """Equilibrium of the wave-frame system. M0 and Q0 are identically
    zero there, kept as fields so the point doubles as a PhaseState."""

    N0: float
    M0: float
    P0: float
    Q0: float
    residual: float
    physical: bool

    def state(self) -> np.ndarray:
        return np.array([self.N0, self.M0, self.P0, self.Q0])


def make_preset(system_id, overrides=None) -> ModelSpec:
    """Build one of the five stock systems, optionally overriding scalars.

    Overriding a parameter the preset does not use is an error, as is
    overriding eps_tilde on systems whose saturation term is structurally
    zero (A and E).
    """
    sysid = str(system_id).strip().upper()
    if sysid not in _PRESET_DEFAULTS:
        raise ConfigError(
            f"unknown system {system_id!r}; choose one of {', '.join(SYSTEM_IDS)}")
    base = dict(_PRESET_DEFAULTS[sysid])
    ov = dict(overrides or {})
    for key, val in ov.items():
        if key not in PARAM_KEYS:
            raise ConfigError(f"unknown parameter {key!r}")
        if key == "eps_tilde":
            if sysid not in _SATURATING:
                raise ConfigError(
                    f"system {sysid} has no saturation term; eps_tilde is "
                    "fixed at zero and cannot be overridden")
            continue
        if key not in base:
            raise ConfigError(
                f"parameter {key!r} is not used by system {sysid}")
        try:
            base[key] = float(val)
        except (TypeError, ValueError):
            raise ConfigError(f"parameter {key!r} must be a number, "
                              f"got {val!r}") from None
    if sysid in _SATURATING:
        try:
            base["eps_tilde"] = float(ov.get("eps_tilde", base["eps"]))
        except (TypeError, ValueError):
            raise ConfigError("eps_tilde must be a number") from None
    params = Params(**base)
    _validate(sysid, params)
    return ModelSpec(system=sysid, params=params,
                     eps_tilde=base.get("eps_tilde", 0.0))


def _validate(sysid, p):
    for name in ("alpha", "beta", "D1", "D2"):
        if p.has(name) and getattr(p, name) == 0.0:
            raise ConfigError(f"{name} must be nonzero")
    if p.has("k") and p.k == 0.0:
        raise ConfigError("k must be nonzero")


def spec_from_mapping(mapping) -> ModelSpec:
    """Inverse of ModelSpec.to_mapping: a flat dict with a 'system' key
    and parameter overrides."""
    mm = dict(mapping)
    system = mm.pop("system", None)
    if system is None:
        raise ConfigError("config does not name a system (key 'system')")
    return make_preset(system, mm)


def evaluate_rhs(spec: ModelSpec, v: float, state) -> np.ndarray:
    """d/dzeta of (N, M, P, Q) at one phase point."""
    N, M, P, Q = state
    p = spec.params
    et = spec.eps_tilde
    saturation = et * N * N / p.k if et != 0.0 else 0.0
    out = np.array([
        M,
        (-v * M - N * spec.F(N) + p.alpha * N * P + saturation) / p.D1,
        Q,
        (-v * Q + P * spec.G(P) - p.beta * N * P) / p.D2,
    ])
    if not np.all(np.isfinite(out)):
        raise FloatingPointError(
            f"non-finite derivative at state {np.asarray(state)!r}")
    return out


def jacobian_at(spec: ModelSpec, v: float, N0: float, P0: float) -> np.ndarray:
    """Jacobian of evaluate_rhs in the state ordering (N, M, P, Q).

    The partials do not involve M or Q beyond the diagonal damping
    terms, so the matrix is valid at any (N0, P0), not only equilibria.
    """
    p = spec.params
    et = spec.eps_tilde
    carry = 2.0 * et * N0 / p.k if et != 0.0 else 0.0
    j21 = (p.alpha * P0 + carry - spec.F(N0) - N0 * spec.F_prime(N0)) / p.D1
    j23 = p.alpha * N0 / p.D1
    j41 = -p.beta * P0 / p.D2
    j43 = (spec.G(P0) + P0 * spec.G_prime(P0) - p.beta * N0) / p.D2
    return np.array([
        [0.0, 1.0, 0.0, 0.0],
        [j21, -v / p.D1, j23, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [j41, 0.0, j43, -v / p.D2],
    ])


def _coexistence_residuals(spec, N0, P0):
    p = spec.params
    sat = spec.eps_tilde * N0 / p.k if spec.eps_tilde != 0.0 else 0.0
    f1 = -spec.F(N0) + p.alpha * P0 + sat
    f2 = spec.G(P0) - p.beta * N0
    return f1, f2


def _polish(spec, N0, P0):
    """Newton iteration on the coexistence pair, shared by every branch."""
    p = spec.params
    et_k = spec.eps_tilde / p.k if spec.eps_tilde != 0.0 else 0.0
    for _ in range(50):
        f1, f2 = _coexistence_residuals(spec, N0, P0)
        if max(abs(f1), abs(f2)) < 1e-15:
            break
        Jm = np.array([[-spec.F_prime(N0) + et_k, p.alpha],
                       [-p.beta, spec.G_prime(P0)]])
        try:
            dx = np.linalg.solve(Jm, [-f1, -f2])
        except np.linalg.LinAlgError:
            break
        N0, P0 = N0 + dx[0], P0 + dx[1]
    return N0, P0


def _quintic_roots_E(p) -> list:
    # eliminate P0 from the coexistence pair; the result is degree 5 in N0
    a2 = p.alpha * p.alpha
    coeffs = [
        p.beta * a2,
        -p.gamma * a2,
        2.0 * p.beta * a2,
        -(2.0 * p.gamma * a2 + p.gamma * p.k * p.delta * p.delta),
        p.beta * a2 - 2.0 * p.gamma * p.k * p.delta,
        -(p.gamma * a2 + p.gamma * p.k),
    ]
    roots = np.roots(coeffs)
    return sorted(r.real for r in roots if abs(r.imag) < 1e-8)


def fixed_points(spec: ModelSpec):
    """All real coexistence equilibria, sorted by N0 ascending.

    Systems A through D have a single closed-form point. System E
    reduces to a quintic in N0, solved by the companion-matrix method;
    every real root is returned. Roots with both populations positive
    are flagged physical. An empty list means no real root exists.
    """
    p = spec.params
    s = spec.system
    pairs = []
    if s in ("A", "B"):
        N0 = p.gamma / p.beta
        P0 = (spec.F(N0) - (spec.eps_tilde * N0 / p.k
                            if spec.eps_tilde != 0.0 else 0.0)) / p.alpha
        pairs.append((N0, P0))
    elif s in ("C", "D"):
        # linear pair: beta N0 = d + c P0 and alpha P0 = F - eps_tilde N0/k.
        # For D, F(N) = k0 (1 + N/k) shifts the effective N0 coefficient
        # by -k0 relative to C.
        eff = p.eps_tilde - p.k0 if s == "D" else p.eps_tilde
        den = eff * p.c + p.alpha * p.beta * p.k
        if den == 0.0:
            return []
        N0 = p.k * (p.alpha * p.d + p.c * p.k0) / den
        P0 = (spec.F(N0) - spec.eps_tilde * N0 / p.k) / p.alpha
        pairs.append((N0, P0))
    else:
        for N0 in _quintic_roots_E(p):
            pairs.append((N0, spec.F(N0) / p.alpha))
    out = []
    for N0, P0 in pairs:
        N0, P0 = _polish(spec, N0, P0)
        res = float(np.max(np.abs(evaluate_rhs(spec, 1.0, (N0, 0.0, P0, 0.0)))))
        out.append(FixedPoint(N0=float(N0), M0=0.0, P0=float(P0), Q0=0.0,
                              residual=res,
                              physical=bool(N0 > 0.0 and P0 > 0.0)))
    out.sort(key=lambda f: f.N0)
    return out


def physical_fixed_point(spec: ModelSpec):
    """The coexistence point with both populations positive, or None.
    If several qualify the one with smallest N0 is returned."""
    for fp in fixed_points(spec):
        if fp.physical:
            return fp
    return None
