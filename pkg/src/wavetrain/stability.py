"""Linear stability of wave-frame equilibria.

Everything here works off the characteristic polynomial

    g(lambda) = lambda^4 + b1 lambda^3 + b2 lambda^2 + b3 lambda + b4

of the 4x4 Jacobian. The oscillatory stability boundary in the wave
speed v is the locus where the fourth Hurwitz quantity vanishes; for
this model family that quantity always reduces to the even quartic
h(v) = v^2 (A v^2 + B), and the critical speeds come from its nonzero
roots.
"""

from __future__ import annotations

import dataclasses
import itertools

import numpy as np

from . import model


class StabilityError(Exception):
    pass


class FrequencyUndefined(StabilityError):
    """b3/b1 not positive: no purely imaginary eigenvalue pair."""


class NoComplexPair(StabilityError):
    """Eigenvalue tracking found nothing near the imaginary axis."""


class CurveStructureError(StabilityError):
    """h(v) failed the even-quartic structure check."""


@dataclasses.dataclass(frozen=True)
class CharCoeffs:
    b1: float
    b2: float
    b3: float
    b4: float

    def as_array(self) -> np.ndarray:
        return np.array([self.b1, self.b2, self.b3, self.b4])


@dataclasses.dataclass(frozen=True)
class RouthHurwitzReport:
    """The four positivity tests. All strictly positive means every
    eigenvalue has negative real part; c4 = 0 with the rest positive is
    the marginal (bifurcation) configuration."""

    c1: float
    c2: float
    c3: float
    c4: float

    @property
    def flags(self):
        return (self.c1 > 0.0, self.c2 > 0.0, self.c3 > 0.0, self.c4 > 0.0)

    @property
    def stable(self) -> bool:
        return all(self.flags)

    def as_dict(self) -> dict:
        return {"c1": self.c1, "c2": self.c2, "c3": self.c3, "c4": self.c4,
                "flags": list(self.flags), "stable": self.stable}


@dataclasses.dataclass(frozen=True)
class EigenSet:
    roots: tuple
    discriminant: float


@dataclasses.dataclass(frozen=True)
class CriticalSpeeds:
    v_minus: float
    v_plus: float
    degenerate: bool


@dataclasses.dataclass(frozen=True)
class VolumeRate:
    rate: float
    label: str


def char_coeffs(J) -> CharCoeffs:
    """Characteristic coefficients from principal-minor sums."""
    J = np.asarray(J, float)
    if J.shape != (4, 4) or not np.all(np.isfinite(J)):
        raise ValueError("need a finite 4x4 matrix")
    b = []
    for k in (1, 2, 3, 4):
        s = sum(np.linalg.det(J[np.ix_(rows, rows)])
                for rows in itertools.combinations(range(4), k))
        b.append(float((-1.0) ** k * s))
    return CharCoeffs(*b)


def routh_hurwitz(b: CharCoeffs) -> RouthHurwitzReport:
    c3 = b.b1 * b.b2 - b.b3
    c4 = b.b1 * (b.b2 * b.b3 - b.b1 * b.b4) - b.b3 * b.b3
    return RouthHurwitzReport(c1=float(b.b1), c2=float(b.b4),
                              c3=float(c3), c4=float(c4))


def coeffs_at(spec, fp, v) -> CharCoeffs:
    """Convenience: characteristic coefficients at a fixed point and speed."""
    N0, P0 = _unpack_fp(fp)
    return char_coeffs(model.jacobian_at(spec, v, N0, P0))


def _unpack_fp(fp):
    if hasattr(fp, "N0"):
        return fp.N0, fp.P0
    N0, P0 = fp
    return float(N0), float(P0)


def _h(spec, N0, P0, v):
    b = char_coeffs(model.jacobian_at(spec, v, N0, P0))
    return routh_hurwitz(b).c4


_STRUCTURE_SAMPLES = (0.7, 1.3, 2.6, -3.7, 5.1)


def hopf_curve(spec, fp):
    """Coefficients (A, B) of the stability boundary h(v) = v^2 (A v^2 + B).

    Extracted by sampling h at v=1 and v=2, then verified at five more
    speeds. The even quartic form is guaranteed by the parity of the
    characteristic coefficients in v, so a structure failure signals an
    invalid fixed point.
    """
    N0, P0 = _unpack_fp(fp)
    h1 = _h(spec, N0, P0, 1.0)
    h2 = _h(spec, N0, P0, 2.0)
    A = (h2 - 4.0 * h1) / 12.0
    B = (16.0 * h1 - h2) / 12.0
    for v in _STRUCTURE_SAMPLES:
        h = _h(spec, N0, P0, v)
        fitted = v * v * (A * v * v + B)
        if abs(h - fitted) > 1e-8 * max(1.0, abs(h)):
            raise CurveStructureError(
                f"h({v}) = {h!r} deviates from v^2(Av^2+B) with "
                f"A={A!r}, B={B!r}; the point is not an equilibrium")
    return A, B


def _snap(A, B):
    scale = max(1.0, abs(A), abs(B))
    A = 0.0 if abs(A) < 1e-12 * scale else A
    B = 0.0 if abs(B) < 1e-12 * scale else B
    return A, B


def critical_speeds(A, B):
    """Nonzero roots (v_minus, v_plus) of the stability boundary, if any.

    AB < 0 gives the symmetric pair. If either coefficient vanishes
    (after snapping values below 1e-12 relative to scale) the quartic
    degenerates and the boundary collapses onto v = 0, reported as the
    degenerate pair (0, 0). Returns None when no boundary exists.
    """
    A, B = _snap(A, B)
    if A == 0.0 or B == 0.0:
        return CriticalSpeeds(v_minus=0.0, v_plus=0.0, degenerate=True)
    if A * B < 0.0:
        vp = float(np.sqrt(-B / A))
        return CriticalSpeeds(v_minus=-vp, v_plus=vp, degenerate=False)
    return None


def classify_regime(A, B) -> str:
    """Stability regime letter from the signs of (A, B).

    a: boundary pair with instability inside (v-, v+).
    b: boundary pair with instability outside.
    c: h > 0 for all nonzero v, stable at every speed.
    d: h < 0 for all nonzero v, unstable at every speed.
    A collapsed boundary (either coefficient zero) that the four cases
    do not cover is reported as "degenerate".
    """
    A, B = _snap(A, B)
    if B > 0.0:
        return "b" if A < 0.0 else "c"
    if B < 0.0:
        return "a" if A > 0.0 else "d"
    return "degenerate"


def hopf_frequency(b: CharCoeffs) -> float:
    """Frequency of the imaginary pair on the boundary, omega = sqrt(b3/b1)."""
    if b.b1 == 0.0 or b.b3 / b.b1 <= 0.0:
        raise FrequencyUndefined(
            f"b3/b1 = {float(b.b3):.6g}/{float(b.b1):.6g} is not positive; "
            "the quartic has no purely imaginary pair here")
    return float(np.sqrt(b.b3 / b.b1))


def degenerate_frequencies(b4: float):
    """Frequency readings for the fully even boundary quartic
    lambda^4 + b2 lambda^2 + b4 that arises when the critical speed is 0.

    Returns (operational, quartic_root): the first is sqrt(-b4), the
    reading used for reporting; the second is the literal magnitude
    (-b4)^(1/4) of the quartic's root when b2 is also dropped. Both are
    returned, labeled, because the conventions differ.
    """
    if b4 >= 0.0:
        raise FrequencyUndefined(
            f"b4 = {b4!r} is nonnegative; the degenerate quartic has no "
            "imaginary pair")
    return float(np.sqrt(-b4)), float((-b4) ** 0.25)


def quartic_roots(b: CharCoeffs) -> EigenSet:
    """All four eigenvalues via the companion matrix, plus the
    discriminant computed from pairwise root differences."""
    coeffs = np.array([1.0, b.b1, b.b2, b.b3, b.b4])
    roots = np.roots(coeffs)
    for lam in roots:
        if abs(np.polyval(coeffs, lam)) > 1e-8 * (1.0 + abs(lam) ** 4):
            raise StabilityError("quartic root residual out of tolerance")
    disc = 1.0 + 0.0j
    for i, j in itertools.combinations(range(4), 2):
        disc *= (roots[i] - roots[j]) ** 2
    ordered = tuple(sorted((complex(r) for r in roots),
                           key=lambda z: (z.real, z.imag)))
    return EigenSet(roots=ordered, discriminant=float(disc.real))


def transversality(spec, fp, v0) -> float:
    """d Re(lambda)/dv of the eigenvalue pair crossing the imaginary
    axis at the critical speed v0, by centered eigenvalue tracking.

    The rate is an even function of v0 (negating v negates the whole
    spectrum, which swaps the identity of the tracked pair), and its
    sign is -sign(D1 + D2). Requires v0 != 0 and an imaginary pair at
    v0; raises NoComplexPair or FrequencyUndefined otherwise.
    """
    if v0 == 0.0:
        raise ValueError("transversality is undefined at v0 = 0")
    N0, P0 = _unpack_fp(fp)
    omega = hopf_frequency(char_coeffs(model.jacobian_at(spec, v0, N0, P0)))
    delta = 1e-5 * max(1.0, abs(v0))
    tracked = []
    for v in (v0 - delta, v0 + delta):
        roots = np.array(quartic_roots(
            char_coeffs(model.jacobian_at(spec, v, N0, P0))).roots)
        lam = roots[np.argmin(np.abs(roots - 1j * omega))]
        if abs(lam.imag) < 0.5 * omega:
            raise NoComplexPair(
                f"no eigenvalue near i*omega at v = {v!r}")
        tracked.append(lam)
    return float((tracked[1].real - tracked[0].real) / (2.0 * delta))


def volume_rate(b1: float) -> VolumeRate:
    """Logarithmic phase-space volume growth rate, the Jacobian trace -b1."""
    rate = -float(b1)
    if rate < -1e-14:
        label = "contracting"
    elif rate > 1e-14:
        label = "dilatory"
    else:
        label = "conservative"
    return VolumeRate(rate=rate, label=label)


@dataclasses.dataclass(frozen=True)
class HopfAnalysis:
    """Everything about the oscillatory stability boundary of one
    equilibrium: curve coefficients, speeds, frequency, regime, and the
    transversality rate where it is defined. Fields that could not be
    computed hold None with the reason appended to notes."""

    A: float
    B: float
    regime: str
    speeds: CriticalSpeeds | None
    omega: float | None
    omega_quartic_root: float | None
    transversality_rate: float | None
    transversality_sign: int | None
    notes: tuple


def hopf_analysis(spec, fp) -> HopfAnalysis:
    N0, P0 = _unpack_fp(fp)
    A, B = hopf_curve(spec, fp)
    regime = classify_regime(A, B)
    speeds = critical_speeds(A, B)
    omega = None
    omega_quartic = None
    rate = None
    sign = None
    notes = []
    if speeds is None:
        notes.append("no critical speed: stability does not change with v")
    else:
        bc = char_coeffs(model.jacobian_at(spec, speeds.v_plus, N0, P0))
        if speeds.degenerate and abs(bc.b1) < 1e-10 and abs(bc.b3) < 1e-10:
            try:
                omega, omega_quartic = degenerate_frequencies(bc.b4)
            except FrequencyUndefined as exc:
                notes.append(str(exc))
        else:
            try:
                omega = hopf_frequency(bc)
                _crosscheck_frequency(spec, N0, P0, omega)
            except FrequencyUndefined as exc:
                notes.append(str(exc))
        if not speeds.degenerate:
            try:
                rate = transversality(spec, fp, speeds.v_plus)
                sign = -1 if rate < 0 else 1
            except (StabilityError, ValueError) as exc:
                notes.append(f"transversality: {exc}")
        else:
            notes.append("transversality undefined at the degenerate "
                         "critical speed 0")
    return HopfAnalysis(A=A, B=B, regime=regime, speeds=speeds, omega=omega,
                        omega_quartic_root=omega_quartic,
                        transversality_rate=rate, transversality_sign=sign,
                        notes=tuple(notes))


def _crosscheck_frequency(spec, N0, P0, omega):
    # closed form of omega^2 in terms of the nonlinearities, valid off
    # the degenerate case; disagreement would mean char_coeffs and the
    # Jacobian fell out of sync
    p = spec.params
    tr = p.D1 + p.D2
    if tr == 0.0:
        return
    sat = spec.eps_tilde / p.k if spec.eps_tilde != 0.0 else 0.0
    w2 = (N0 * (spec.F_prime(N0) - sat) - P0 * spec.G_prime(P0)) / tr
    if w2 > 0.0 and abs(np.sqrt(w2) - omega) > 1e-8 * max(1.0, omega):
        raise StabilityError(
            f"frequency cross-check failed: sqrt({w2!r}) vs {omega!r}")
