"""Time-dependent system parameters for the planar charged particle.

A profile bundles the charge q, the (static) magnetic field B, the coupling
constant kappa of the auxiliary equation, and the time-dependent functions
M(t), omega(t), E1(t), E2(t) on a finite window [t0, t1].  Derived
frequencies: the cyclotron frequency omega_c(t) = q B / M(t) and the
effective trap frequency Omega(t) = sqrt(omega(t)**2 + omega_c(t)**2 / 4).

Five concrete kinds are built in:

``constant``
    M, omega, E1, E2 all constant.
``exponential-mass``
    M(t) = M0 * exp(-alpha * t), omega constant.
``exponential-frequency``
    omega(t) = tau * exp(alpha * t), M constant.
``sinusoidal``
    omega(t) = omega0 * (1 + depth * sin(rate * t)), M constant
    (|depth| < 1 keeps omega positive).
``tabulated``
    M and omega sampled on a time grid, monotone cubic (PCHIP)
    interpolation in between.

Built-in kinds carry constant field components; a time-dependent field is
expressed through the tabulated kind.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (
    GridTooShort,
    MissingParameter,
    NonPositiveMassOrFrequency,
    OutOfDomain,
    UnsupportedKind,
)

__all__ = [
    "ParameterProfile",
    "DerivedFrequencies",
    "make_profile",
    "eval_derived",
    "profile_to_json",
    "profile_from_json",
]

PROFILE_KINDS = (
    "constant",
    "exponential-mass",
    "exponential-frequency",
    "sinusoidal",
    "tabulated",
)

# Number of samples used to certify positivity of M and omega on [t0, t1].
_POSITIVITY_SAMPLES = 2001


@dataclass(frozen=True)
class DerivedFrequencies:
    """Cyclotron and effective frequencies at a single time."""

    omega_c: float
    Omega: float


@dataclass(frozen=True)
class ParameterProfile:
    """Parameter set of the driven planar system on a time window.

    The callables accept a float or an ndarray and broadcast.  ``mass_rate``
    is the exact derivative of ``mass`` (interpolant derivative for the
    tabulated kind), not a finite difference.
    """

    kind: str
    q: float
    B: float
    kappa: float
    t0: float
    t1: float
    mass: Callable[[np.ndarray], np.ndarray]
    mass_rate: Callable[[np.ndarray], np.ndarray]
    omega: Callable[[np.ndarray], np.ndarray]
    efield1: Callable[[np.ndarray], np.ndarray]
    efield2: Callable[[np.ndarray], np.ndarray]
    params: Mapping[str, object] = field(repr=False)

    @property
    def span(self) -> float:
        return self.t1 - self.t0

    def check_time(self, t) -> None:
        """Raise OutOfDomain unless t (scalar or array) lies in [t0, t1]."""
        t = np.asarray(t, dtype=float)
        tol = 1e-12 * max(1.0, abs(self.t0), abs(self.t1))
        if np.any(t < self.t0 - tol) or np.any(t > self.t1 + tol):
            raise OutOfDomain(
                f"t={t!r} outside profile window [{self.t0}, {self.t1}]"
            )

    def omega_c(self, t):
        """Cyclotron frequency q B / M(t)."""
        self.check_time(t)
        return self.q * self.B / self.mass(t)

    def Omega(self, t):
        """Effective frequency sqrt(omega**2 + omega_c**2 / 4)."""
        self.check_time(t)
        w = self.omega(t)
        wc = self.q * self.B / self.mass(t)
        return np.sqrt(w * w + 0.25 * wc * wc)

    def efield_sq(self, t):
        """|E(t)|**2 = E1**2 + E2**2."""
        e1 = self.efield1(t)
        e2 = self.efield2(t)
        return e1 * e1 + e2 * e2


def _require(params: Mapping[str, object], *names: str) -> list:
    out = []
    for name in names:
        if name not in params:
            raise MissingParameter(f"profile parameter {name!r} is required")
        out.append(params[name])
    return out


def _const_fn(value: float) -> Callable:
    value = float(value)

    def fn(t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(np.float64(value), t.shape).copy() if t.ndim else np.float64(value)

    return fn


def make_profile(
    kind: str,
    params: Mapping[str, object],
    *,
    q: float = 0.0,
    B: float = 0.0,
    kappa: float = 1.0,
    t0: float = 0.0,
    t1: float = 10.0,
) -> ParameterProfile:
    """Build a ParameterProfile of one of the built-in kinds.

    Raises
    ------
    UnsupportedKind
        Unknown ``kind`` tag.
    MissingParameter
        A parameter the kind needs is absent.
    NonPositiveMassOrFrequency
        M or omega fails strict positivity anywhere on [t0, t1]
        (certified on a dense sample).
    GridTooShort
        Tabulated kind with fewer than 4 samples.
    """
    if kind not in PROFILE_KINDS:
        raise UnsupportedKind(
            f"kind {kind!r} not one of {', '.join(PROFILE_KINDS)}"
        )
    if not t1 > t0:
        raise OutOfDomain(f"empty time window [{t0}, {t1}]")
    if kappa <= 0:
        raise NonPositiveMassOrFrequency("kappa must be positive")

    params = dict(params)
    e1 = _const_fn(params.get("E1", 0.0))
    e2 = _const_fn(params.get("E2", 0.0))

    if kind == "constant":
        (M, omega) = _require(params, "M", "omega")
        mass = _const_fn(M)
        mass_rate = _const_fn(0.0)
        omega_fn = _const_fn(omega)

    elif kind == "exponential-mass":
        (alpha, omega) = _require(params, "alpha", "omega")
        M0 = float(params.get("M0", 1.0))
        alpha = float(alpha)

        def mass(t, M0=M0, alpha=alpha):
            return M0 * np.exp(-alpha * np.asarray(t, dtype=float))

        def mass_rate(t, M0=M0, alpha=alpha):
            return -alpha * M0 * np.exp(-alpha * np.asarray(t, dtype=float))

        omega_fn = _const_fn(omega)

    elif kind == "exponential-frequency":
        (tau, alpha) = _require(params, "tau", "alpha")
        M = float(params.get("M", 1.0))
        tau, alpha = float(tau), float(alpha)
        mass = _const_fn(M)
        mass_rate = _const_fn(0.0)

        def omega_fn(t, tau=tau, alpha=alpha):
            return tau * np.exp(alpha * np.asarray(t, dtype=float))

    elif kind == "sinusoidal":
        (omega0, depth, rate) = _require(params, "omega0", "depth", "rate")
        M = float(params.get("M", 1.0))
        omega0, depth, rate = float(omega0), float(depth), float(rate)
        if abs(depth) >= 1.0:
            raise NonPositiveMassOrFrequency(
                f"|depth| = {abs(depth)} >= 1 lets omega touch zero"
            )
        mass = _const_fn(M)
        mass_rate = _const_fn(0.0)

        def omega_fn(t, omega0=omega0, depth=depth, rate=rate):
            t = np.asarray(t, dtype=float)
            return omega0 * (1.0 + depth * np.sin(rate * t))

    else:  # tabulated
        (t_tab, M_tab, w_tab) = _require(params, "t", "M", "omega")
        t_tab = np.asarray(t_tab, dtype=float)
        M_tab = np.asarray(M_tab, dtype=float)
        w_tab = np.asarray(w_tab, dtype=float)
        if t_tab.size < 4:
            raise GridTooShort(
                f"tabulated profile needs >= 4 samples, got {t_tab.size}"
            )
        if t_tab.size != M_tab.size or t_tab.size != w_tab.size:
            raise MissingParameter("t, M, omega tables must share a length")
        mass_ip = PchipInterpolator(t_tab, M_tab)
        mass_rate_ip = mass_ip.derivative()
        omega_ip = PchipInterpolator(t_tab, w_tab)
        mass = lambda t: mass_ip(np.asarray(t, dtype=float))  # noqa: E731
        mass_rate = lambda t: mass_rate_ip(np.asarray(t, dtype=float))  # noqa: E731
        omega_fn = lambda t: omega_ip(np.asarray(t, dtype=float))  # noqa: E731
        if "E1" in params and np.ndim(params["E1"]) > 0:
            e1_ip = PchipInterpolator(t_tab, np.asarray(params["E1"], dtype=float))
            e1 = lambda t: e1_ip(np.asarray(t, dtype=float))  # noqa: E731
        if "E2" in params and np.ndim(params["E2"]) > 0:
            e2_ip = PchipInterpolator(t_tab, np.asarray(params["E2"], dtype=float))
            e2 = lambda t: e2_ip(np.asarray(t, dtype=float))  # noqa: E731
        t0 = max(t0, float(t_tab[0]))
        t1 = min(t1, float(t_tab[-1]))
        if not t1 > t0:
            raise OutOfDomain("tabulated window does not overlap [t0, t1]")

    sample = np.linspace(t0, t1, _POSITIVITY_SAMPLES)
    M_s = np.asarray(mass(sample), dtype=float)
    w_s = np.asarray(omega_fn(sample), dtype=float)
    if not (np.all(M_s > 0.0) and np.all(np.isfinite(M_s))):
        raise NonPositiveMassOrFrequency("M(t) must be finite and > 0 on the window")
    if not (np.all(w_s > 0.0) and np.all(np.isfinite(w_s))):
        raise NonPositiveMassOrFrequency("omega(t) must be finite and > 0 on the window")

    return ParameterProfile(
        kind=kind,
        q=float(q),
        B=float(B),
        kappa=float(kappa),
        t0=float(t0),
        t1=float(t1),
        mass=mass,
        mass_rate=mass_rate,
        omega=omega_fn,
        efield1=e1,
        efield2=e2,
        params=params,
    )


def eval_derived(profile: ParameterProfile, t: float) -> DerivedFrequencies:
    """Evaluate (omega_c, Omega) at a single time inside the window."""
    profile.check_time(t)
    return DerivedFrequencies(
        omega_c=float(profile.omega_c(t)),
        Omega=float(profile.Omega(t)),
    )


def profile_to_json(profile: ParameterProfile) -> str:
    """Serialize a profile to the CLI JSON schema."""
    params = {
        k: (v.tolist() if isinstance(v, np.ndarray) else v)
        for k, v in profile.params.items()
    }
    return json.dumps(
        {
            "kind": profile.kind,
            "q": profile.q,
            "B": profile.B,
            "kappa": profile.kappa,
            "params": params,
            "t0": profile.t0,
            "t1": profile.t1,
        },
        indent=2,
        sort_keys=True,
    )


def profile_from_json(text: str) -> ParameterProfile:
    """Parse the CLI JSON schema into a profile."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MissingParameter(f"profile JSON does not parse: {exc}") from exc
    if not isinstance(doc, dict):
        raise MissingParameter("profile JSON must be an object")
    if "kind" not in doc:
        raise MissingParameter("profile JSON needs a 'kind' entry")
    return make_profile(
        doc["kind"],
        doc.get("params", {}),
        q=float(doc.get("q", 0.0)),
        B=float(doc.get("B", 0.0)),
        kappa=float(doc.get("kappa", 1.0)),
        t0=float(doc.get("t0", 0.0)),
        t1=float(doc.get("t1", 10.0)),
    )
