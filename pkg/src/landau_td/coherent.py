"""Coherent-state families on the truncated two-mode helicity lattice.

Every state is a coefficient table over (n_plus, n_minus), built by one of
the constructors below; closed-form overlaps, photon distributions and
weight functions serve as verification targets against the tables.

Families and supports:

``canonical``           full lattice, c = Poisson amplitudes in each mode.
``nonlinear``           full lattice, f-deformed amplitudes with the
                        factorial convention [f(n)]! = f(1)...f(n), [f(0)]! = 1.
``photon_added``        lattice shifted by the added quanta (m_plus, m_minus).
``su2``                 anti-diagonal shell n_plus + n_minus = 2j.
``su2_pa``              same shell, support starting at n_plus = p.
``su11_bg``             diagonal n_plus - n_minus = ell (Bargmann k = (ell+1)/2).
``su11_perelomov``      same diagonal.
``su11_pa_perelomov``   diagonal shifted by the added index l.
``su11_pa_bg``          diagonal shifted by n_add.

Normalization policy: families with an exact closed-form constant
(canonical, su2, su2_pa, su11_bg, su11_perelomov) use it, so norm_deficit
measures pure truncation loss; the photon-added families normalize by the
truncated series itself, so their norm_deficit is zero by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np
from scipy.special import gammaln

from .auxode import AuxiliarySolution
from .errors import (
    CutoffMismatch,
    CutoffOverflow,
    CutoffTooSmall,
    DomainError,
    EtaOutOfDisk,
    NormalizationDiverges,
    PTooLarge,
    UnsupportedFamily,
    WrongFamily,
    ZeroF,
)
from .profiles import ParameterProfile
from .specfun import MeijerGSpec, bessel, gamma_fn, hypergeometric, meijer_g
from .spectrum import _drive_energy, _radial_energy

__all__ = [
    "StateVector",
    "EvolutionParams",
    "WeightSpec",
    "canonical_state",
    "overlap",
    "distribution",
    "evolution_params",
    "evolve_canonical",
    "nonlinear_state",
    "photon_added_state",
    "pa_nonlinear_function",
    "su2_state",
    "su2_pa_state",
    "su11_bg_state",
    "su11_perelomov_state",
    "su11_pa_perelomov_state",
    "su11_pa_bg_state",
    "single_mode_wavefunction",
    "weight_spec",
    "canonical_overlap_modulus",
    "su2_overlap",
    "bg_overlap",
    "perelomov_overlap",
    "pa_bg_overlap",
    "state_to_json",
    "state_from_json",
]

_MAX_CUTOFF = 10_000
_TAIL_LOG = math.log(1e-16)


@dataclass
class StateVector:
    """Truncated coefficient table of a coherent-state family."""

    cutoff: int
    coeffs: np.ndarray  # complex, shape (cutoff+1, cutoff+1), index [n+, n-]
    family: str
    params: dict = field(repr=False)
    norm_deficit: float = 0.0

    def __post_init__(self):
        total = float(np.sum(np.abs(self.coeffs) ** 2))
        if total > 1.0 + 1e-12:
            raise ValueError(f"coefficient table over-normalized: {total}")


@dataclass(frozen=True)
class EvolutionParams:
    """Mode-rotation rates of the evolved canonical family.

    T1 is the radial energy scale, T2 = omega_c/2 splits the two
    helicities, lam is the c-number drive term.
    """

    T1: float
    T2: float
    lam: float


@dataclass
class WeightSpec:
    """Moment-problem data for a family's resolution of the identity.

    The check integrates x^(m + power_offset) * evaluator(x) over
    (0, x_max or inf) and compares with moment_target(m) for admissible
    m in [m_min, m_max].
    """

    family: str
    evaluator: Callable[[float], float]
    moment_target: Callable[[int], float]
    m_min: int = 0
    m_max: Optional[int] = None
    power_offset: int = 0
    x_max: Optional[float] = None


# ---------------------------------------------------------------------------
# canonical family
# ---------------------------------------------------------------------------

def _poisson_cutoff(abs_z: float) -> int:
    for n in range(8, _MAX_CUTOFF):
        if abs_z == 0.0:
            return 8
        log_term = -abs_z**2 + 2 * n * math.log(abs_z) - gammaln(n + 1)
        if log_term < _TAIL_LOG:
            return n
    raise CutoffOverflow(f"|z| = {abs_z} needs a cutoff beyond {_MAX_CUTOFF}")


def _canonical_mode(z: complex, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff + 1)
    if z == 0:
        out = np.zeros(cutoff + 1, dtype=complex)
        out[0] = 1.0
        return out
    log_mag = -abs(z) ** 2 / 2.0 + n * math.log(abs(z)) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(z))


def canonical_state(
    z_plus: complex, z_minus: complex, cutoff: Optional[int] = None
) -> StateVector:
    """Two-mode canonical coherent state with Poisson amplitudes.

    c(n+, n-) = exp(-(|z+|^2 + |z-|^2)/2) z+^{n+} z-^{n-} / sqrt(n+! n-!).
    The cutoff is raised until the per-mode tail drops below 1e-16.
    """
    needed = max(_poisson_cutoff(abs(z_plus)), _poisson_cutoff(abs(z_minus)))
    if cutoff is not None and cutoff > _MAX_CUTOFF:
        raise CutoffOverflow(f"cutoff {cutoff} beyond supported {_MAX_CUTOFF}")
    n_cut = max(cutoff or 0, needed)
    coeffs = np.outer(_canonical_mode(z_plus, n_cut), _canonical_mode(z_minus, n_cut))
    deficit = 1.0 - float(np.sum(np.abs(coeffs) ** 2))
    return StateVector(
        cutoff=n_cut,
        coeffs=coeffs,
        family="canonical",
        params={"z_plus": complex(z_plus), "z_minus": complex(z_minus)},
        norm_deficit=deficit,
    )


def overlap(a: StateVector, b: StateVector) -> complex:
    """Inner product <a|b> of two coefficient tables."""
    if a.cutoff != b.cutoff:
        raise CutoffMismatch(f"cutoffs differ: {a.cutoff} vs {b.cutoff}")
    return complex(np.vdot(a.coeffs, b.coeffs))


def distribution(s: StateVector) -> np.ndarray:
    """Occupation probabilities P(n+, n-) = |c|^2."""
    return np.abs(s.coeffs) ** 2


def evolution_params(
    profile: ParameterProfile, aux: AuxiliarySolution, t: float
) -> EvolutionParams:
    """Frozen-time rotation rates (T1, T2, lam) of the canonical family."""
    return EvolutionParams(
        T1=_radial_energy(profile, aux, t),
        T2=0.5 * float(profile.omega_c(t)),
        lam=_drive_energy(profile, t),
    )


def evolve_canonical(s: StateVector, params: EvolutionParams, tau: float) -> StateVector:
    """Rotate the canonical labels: z_pm -> exp(-i(T1 +- T2) tau) z_pm,
    with global phase exp(-i(T1 - lam) tau)."""
    if s.family != "canonical":
        raise WrongFamily(f"evolution closed form applies to canonical, got {s.family}")
    z_p = s.params["z_plus"] * np.exp(-1j * (params.T1 + params.T2) * tau)
    z_m = s.params["z_minus"] * np.exp(-1j * (params.T1 - params.T2) * tau)
    out = canonical_state(z_p, z_m, cutoff=s.cutoff)
    phase = np.exp(-1j * (params.T1 - params.lam) * tau)
    out.coeffs = out.coeffs * phase
    out.params["global_phase"] = complex(phase)
    return out


# ---------------------------------------------------------------------------
# deformed and photon-added families
# ---------------------------------------------------------------------------

def _deformed_mode(alpha: complex, f: Callable[[int], float], cutoff: int) -> np.ndarray:
    """Unnormalized amplitudes alpha^n / (sqrt(n!) [f(n)]!)."""
    out = np.empty(cutoff + 1, dtype=complex)
    out[0] = 1.0
    acc = 1.0 + 0.0j
    for n in range(1, cutoff + 1):
        fn = float(f(n))
        if fn == 0.0:
            raise ZeroF(f"deformation function vanishes at n = {n}")
        acc = acc * alpha / (math.sqrt(n) * fn)
        out[n] = acc
    return out


def _check_mode_tail(weights: np.ndarray, label: str) -> None:
    total = float(np.sum(np.abs(weights) ** 2))
    tail = float(np.abs(weights[-1]) ** 2)
    if tail > 1e-10 * total:
        raise NormalizationDiverges(
            f"{label}: last-shell weight {tail:.3e} not negligible against "
            f"{total:.3e}; the truncated normalization has not converged"
        )


def nonlinear_state(
    alpha_plus: complex,
    alpha_minus: complex,
    f_plus: Callable[[int], float],
    f_minus: Callable[[int], float],
    cutoff: int = 40,
) -> StateVector:
    """f-deformed coherent state, eigenvector of a f(N) in each mode."""
    w_p = _deformed_mode(alpha_plus, f_plus, cutoff)
    w_m = _deformed_mode(alpha_minus, f_minus, cutoff)
    _check_mode_tail(w_p, "plus mode")
    _check_mode_tail(w_m, "minus mode")
    coeffs = np.outer(w_p, w_m)
    coeffs /= math.sqrt(float(np.sum(np.abs(coeffs) ** 2)))
    return StateVector(
        cutoff=cutoff,
        coeffs=coeffs,
        family="nonlinear",
        params={"alpha_plus": complex(alpha_plus), "alpha_minus": complex(alpha_minus)},
        norm_deficit=0.0,
    )


def _added_mode(alpha: complex, m_add: int, cutoff: int) -> np.ndarray:
    """Unnormalized amplitudes of (a^dag)^m acting on a coherent mode:
    weight alpha^(n-m) sqrt(n!) / (n-m)! for n >= m."""
    out = np.zeros(cutoff + 1, dtype=complex)
    n = np.arange(m_add, cutoff + 1)
    k = n - m_add
    if alpha == 0:
        out[m_add] = 1.0
        return out
    log_mag = k * math.log(abs(alpha)) + 0.5 * gammaln(n + 1) - gammaln(k + 1)
    out[m_add:] = np.exp(log_mag - np.max(log_mag)) * np.exp(1j * k * np.angle(alpha))
    return out


def photon_added_state(
    alpha_plus: complex,
    alpha_minus: complex,
    m_plus: int,
    m_minus: int,
    cutoff: int = 40,
) -> StateVector:
    """Normalized image of a canonical state under (a+dag)^m+ (a-dag)^m-."""
    if m_plus < 0 or m_minus < 0:
        raise ValueError("added photon numbers must be nonnegative")
    if cutoff < max(m_plus, m_minus) + 2:
        raise CutoffTooSmall(
            f"cutoff {cutoff} cannot hold {m_plus}/{m_minus} added quanta"
        )
    if cutoff > _MAX_CUTOFF:
        raise CutoffOverflow(f"cutoff {cutoff} beyond supported {_MAX_CUTOFF}")
    w_p = _added_mode(alpha_plus, m_plus, cutoff)
    w_m = _added_mode(alpha_minus, m_minus, cutoff)
    _check_mode_tail(w_p, "plus mode")
    _check_mode_tail(w_m, "minus mode")
    coeffs = np.outer(w_p, w_m)
    coeffs /= math.sqrt(float(np.sum(np.abs(coeffs) ** 2)))
    return StateVector(
        cutoff=cutoff,
        coeffs=coeffs,
        family="photon_added",
        params={
            "alpha_plus": complex(alpha_plus),
            "alpha_minus": complex(alpha_minus),
            "m_plus": m_plus,
            "m_minus": m_minus,
        },
        norm_deficit=0.0,
    )


def pa_nonlinear_function(m_plus: int, m_minus: int, n_plus: int, n_minus: int) -> float:
    """Deformation function whose eigenstates reproduce photon addition:
    (1 - m+/(n+ + 1)) (1 - m-/(n- + 1))."""
    return (1.0 - m_plus / (n_plus + 1.0)) * (1.0 - m_minus / (n_minus + 1.0))


# ---------------------------------------------------------------------------
# SU(2) families
# ---------------------------------------------------------------------------

def _check_spin(j: float) -> int:
    two_j = int(round(2 * j))
    if abs(2 * j - two_j) > 1e-12 or two_j < 0:
        raise ValueError(f"j must be a nonnegative half-integer, got {j}")
    return two_j


def su2_state(j: float, zeta: complex, cutoff: Optional[int] = None) -> StateVector:
    """Spin coherent state on the shell n+ + n- = 2j.

    c_m = (1+|zeta|^2)^{-j} sqrt(C(2j, m)) zeta^m at (n+, n-) = (m, 2j-m).
    """
    two_j = _check_spin(j)
    n_cut = two_j if cutoff is None else cutoff
    if n_cut < two_j:
        raise CutoffTooSmall(f"cutoff {n_cut} < 2j = {two_j}")
    coeffs = np.zeros((n_cut + 1, n_cut + 1), dtype=complex)
    pref = (1.0 + abs(zeta) ** 2) ** (-j)
    for m in range(two_j + 1):
        log_binom = 0.5 * (
            gammaln(two_j + 1) - gammaln(m + 1) - gammaln(two_j - m + 1)
        )
        coeffs[m, two_j - m] = pref * math.exp(log_binom) * zeta**m
    deficit = 1.0 - float(np.sum(np.abs(coeffs) ** 2))
    return StateVector(
        cutoff=n_cut,
        coeffs=coeffs,
        family="su2",
        params={"j": j, "zeta": complex(zeta)},
        norm_deficit=deficit,
    )


def su2_pa_state(
    j: float, zeta: complex, p: int, cutoff: Optional[int] = None
) -> StateVector:
    """Photon-added spin state: (J+)^p image of the su2 state.

    c_m proportional to sqrt((2j)! (m+p)!) / (m! sqrt((2j-m-p)!)) zeta^m on
    (n+, n-) = (m+p, 2j-m-p); the normalization constant is the terminating
    Gauss series 2F1(1+p, p-2j; 1; -|zeta|^2) scaled by Gamma ratios.
    """
    two_j = _check_spin(j)
    if p < 0:
        raise ValueError("p must be nonnegative")
    if p > two_j:
        raise PTooLarge(f"p = {p} exceeds 2j = {two_j}")
    n_cut = two_j if cutoff is None else cutoff
    if n_cut < two_j:
        raise CutoffTooSmall(f"cutoff {n_cut} < 2j = {two_j}")
    norm_sq = (
        gamma_fn(1 + two_j)
        * gamma_fn(1 + p)
        / gamma_fn(1 + two_j - p)
        * float(hypergeometric([1 + p, p - two_j], [1.0], -abs(zeta) ** 2).real)
    )
    coeffs = np.zeros((n_cut + 1, n_cut + 1), dtype=complex)
    for m in range(two_j - p + 1):
        log_mag = 0.5 * (gammaln(two_j + 1) + gammaln(m + p + 1)) - gammaln(
            m + 1
        ) - 0.5 * gammaln(two_j - m - p + 1)
        coeffs[m + p, two_j - m - p] = math.exp(log_mag) * zeta**m
    coeffs /= math.sqrt(norm_sq)
    deficit = 1.0 - float(np.sum(np.abs(coeffs) ** 2))
    return StateVector(
        cutoff=n_cut,
        coeffs=coeffs,
        family="su2_pa",
        params={"j": j, "zeta": complex(zeta), "p": p},
        norm_deficit=deficit,
    )


# ---------------------------------------------------------------------------
# su(1,1) families
# ---------------------------------------------------------------------------

def _lattice_ell(k_mode) -> tuple:
    """Resolve a mode tag into (k, ell) with ell = 2k - 1 on the lattice."""
    tag, value = k_mode
    if tag == "two_mode":
        k = float(value)
        ell = 2.0 * k - 1.0
        if k <= 0 or abs(ell - round(ell)) > 1e-12 or round(ell) < 0:
            raise UnsupportedFamily(
                f"two-mode realization needs 2k-1 a nonnegative integer, got k={k}"
            )
        return k, int(round(ell))
    if tag == "single_mode":
        ell = int(value)
        if ell < 0:
            raise ValueError(
                "single-mode ell must be >= 0 here; negative values follow "
                "by exchanging the two modes"
            )
        return 0.5 * (ell + 1), ell
    raise UnsupportedFamily(f"unknown su(1,1) mode tag {tag!r}")


def _bg_cutoff(abs_z: float, two_k: float) -> int:
    if abs_z == 0.0:
        return 8
    best = -math.inf
    for m in range(8, _MAX_CUTOFF):
        log_term = 2 * m * math.log(abs_z) - gammaln(m + 1) - gammaln(m + two_k)
        best = max(best, log_term)
        if log_term < best - 40.0:
            return m
    raise CutoffOverflow(f"|z| = {abs_z} needs a cutoff beyond {_MAX_CUTOFF}")


def su11_bg_state(k_mode, z: complex, cutoff: Optional[int] = None) -> StateVector:
    """Lowering-generator eigenstate (K- eigenvalue z) on a fixed diagonal.

    c_m = N z^m / sqrt(m! Gamma(m+2k)), N = sqrt(|z|^{2k-1} / I_{2k-1}(2|z|)).
    """
    k, ell = _lattice_ell(k_mode)
    two_k = 2.0 * k
    m_needed = _bg_cutoff(abs(z), two_k)
    n_cut = max((cutoff or 0), m_needed + ell)
    if n_cut > _MAX_CUTOFF:
        raise CutoffOverflow(f"cutoff {n_cut} beyond supported {_MAX_CUTOFF}")
    nu = two_k - 1.0
    if z == 0:
        log_norm = 0.5 * gammaln(two_k)  # limit |z|^nu / I_nu(2|z|) -> Gamma(2k)
    else:
        log_norm = 0.5 * (
            nu * math.log(abs(z)) - math.log(float(bessel("I", nu, 2 * abs(z))))
        )
    coeffs = np.zeros((n_cut + 1, n_cut + 1), dtype=complex)
    for m in range(n_cut - ell + 1):
        if z == 0 and m > 0:
            break
        log_mag = (
            log_norm
            + (m * math.log(abs(z)) if z != 0 else 0.0)
            - 0.5 * (gammaln(m + 1) + gammaln(m + two_k))
        )
        coeffs[m + ell, m] = math.exp(log_mag) * np.exp(1j * m * np.angle(z))
    deficit = 1.0 - float(np.sum(np.abs(coeffs) ** 2))
    return StateVector(
        cutoff=n_cut,
        coeffs=coeffs,
        family="su11_bg",
        params={"k": k, "ell": ell, "z": complex(z)},
        norm_deficit=deficit,
    )


def su11_perelomov_state(k_mode, eta: complex, cutoff: Optional[int] = None) -> StateVector:
    """Displacement-operator state on a fixed diagonal.

    c_m = (1-|eta|^2)^k sqrt(Gamma(2k+m)/(m! Gamma(2k))) eta^m; the analytic
    prefactor is exact, so norm_deficit is the truncation tail.
    """
    k, ell = _lattice_ell(k_mode)
    if abs(eta) >= 1.0:
        raise EtaOutOfDisk(f"|eta| = {abs(eta)} must be < 1")
    two_k = 2.0 * k
    # geometric-tail cutoff: term ratio -> |eta|^2 for large m
    m_needed = 8
    if eta != 0:
        log_eta_sq = 2.0 * math.log(abs(eta))
        best = -math.inf
        for m in range(8, _MAX_CUTOFF):
            log_term = (
                gammaln(two_k + m) - gammaln(m + 1) - gammaln(two_k) + m * log_eta_sq
            )
            best = max(best, log_term)
            if log_term < best + math.log1p(-abs(eta) ** 2) - 34.0:
                m_needed = m
                break
        else:
            raise CutoffOverflow(f"|eta| = {abs(eta)} too close to the disk edge")
    n_cut = max((cutoff or 0), m_needed + ell)
    coeffs = np.zeros((n_cut + 1, n_cut + 1), dtype=complex)
    pref = (1.0 - abs(eta) ** 2) ** k
    for m in range(n_cut - ell + 1):
        if eta == 0 and m > 0:
            break
        log_mag = 0.5 * (gammaln(two_k + m) - gammaln(m + 1) - gammaln(two_k))
        coeffs[m + ell, m] = pref * math.exp(
            log_mag + (m * math.log(abs(eta)) if eta != 0 else 0.0)
        ) * np.exp(1j * m * np.angle(eta))
    deficit = 1.0 - float(np.sum(np.abs(coeffs) ** 2))
    return StateVector(
        cutoff=n_cut,
        coeffs=coeffs,
        family="su11_perelomov",
        params={"k": k, "ell": ell, "eta": complex(eta)},
        norm_deficit=deficit,
    )


def _pa_weight_f(k: float, l: int, m: np.ndarray) -> np.ndarray:
    """F_l(k, m) = (m!)^2 Gamma(2k) / (Gamma(m+l+1) Gamma(m+2k+l))."""
    return np.exp(
        2.0 * gammaln(m + 1)
        + gammaln(2.0 * k)
        - gammaln(m + l + 1)
        - gammaln(m + 2.0 * k + l)
    )


def su11_pa_perelomov_state(
    k: float, eta: complex, l: int, cutoff: Optional[int] = None
) -> StateVector:
    """(K+)^l image of the Perelomov state, truncated-series normalization.

    c_m proportional to eta^m / sqrt(F_l(k, m)).
    """
    if abs(eta) >= 1.0:
        raise EtaOutOfDisk(f"|eta| = {abs(eta)} must be < 1")
    if l < 0:
        raise ValueError("added index l must be nonnegative")
    _, ell = _lattice_ell(("two_mode", k))
    shift = l + ell
    # term ratio -> |eta|^2 for large m; stop well past the series peak
    m_needed = 12
    if eta != 0:
        best = -math.inf
        for m in range(12, _MAX_CUTOFF):
            log_term = (
                2 * m * math.log(abs(eta))
                - float(np.log(_pa_weight_f(k, l, np.array([m])))[0])
            )
            best = max(best, log_term)
            if log_term < best + math.log1p(-abs(eta) ** 2) - 34.0:
                m_needed = m
                break
        else:
            raise CutoffOverflow(f"|eta| = {abs(eta)} too close to the disk edge")
    n_cut = max((cutoff or 0), m_needed + shift)
    m_arr = np.arange(n_cut - shift + 1)
    if eta == 0:
        amps = np.zeros(m_arr.size, dtype=complex)
        amps[0] = 1.0
    else:
        log_mag = m_arr * math.log(abs(eta)) - 0.5 * np.log(_pa_weight_f(k, l, m_arr))
        amps = np.exp(log_mag - np.max(log_mag)) * np.exp(1j * m_arr * np.angle(eta))
    amps /= math.sqrt(float(np.sum(np.abs(amps) ** 2)))
    coeffs = np.zeros((n_cut + 1, n_cut + 1), dtype=complex)
    coeffs[m_arr + shift, m_arr + l] = amps
    return StateVector(
        cutoff=n_cut,
        coeffs=coeffs,
        family="su11_pa_perelomov",
        params={"k": k, "eta": complex(eta), "l": l},
        norm_deficit=0.0,
    )


def _pa_bg_weight(k: float, n_add: int, m: np.ndarray) -> np.ndarray:
    """rho_n(k, m) = [Gamma(m+1) Gamma(m+2k)]^2 / (Gamma(m+n+1) Gamma(m+n+2k))."""
    return np.exp(
        2.0 * (gammaln(m + 1) + gammaln(m + 2.0 * k))
        - gammaln(m + n_add + 1)
        - gammaln(m + n_add + 2.0 * k)
    )


def su11_pa_bg_state(
    k: float, z: complex, n_add: int, cutoff: Optional[int] = None
) -> StateVector:
    """(K+)^n image of the Barut-Girardello state.

    c_m proportional to z^m / sqrt(rho_n(k, m)), truncated-series
    normalization; n_add = 0 recovers the BG amplitudes exactly.
    """
    if n_add < 0:
        raise ValueError("added index must be nonnegative")
    _, ell = _lattice_ell(("two_mode", k))
    shift = n_add + ell
    m_needed = 8 if z == 0 else _bg_cutoff(abs(z), 2.0 * k) + n_add + 4
    n_cut = max((cutoff or 0), m_needed + shift)
    if n_cut > _MAX_CUTOFF:
        raise CutoffOverflow(f"cutoff {n_cut} beyond supported {_MAX_CUTOFF}")
    m_arr = np.arange(n_cut - shift + 1)
    if z == 0:
        amps = np.zeros(m_arr.size, dtype=complex)
        amps[0] = 1.0
    else:
        log_mag = m_arr * math.log(abs(z)) - 0.5 * np.log(_pa_bg_weight(k, n_add, m_arr))
        amps = np.exp(log_mag - np.max(log_mag)) * np.exp(1j * m_arr * np.angle(z))
    amps /= math.sqrt(float(np.sum(np.abs(amps) ** 2)))
    coeffs = np.zeros((n_cut + 1, n_cut + 1), dtype=complex)
    coeffs[m_arr + shift, m_arr + n_add] = amps
    return StateVector(
        cutoff=n_cut,
        coeffs=coeffs,
        family="su11_pa_bg",
        params={"k": k, "z": complex(z), "n_add": n_add},
        norm_deficit=0.0,
    )


# ---------------------------------------------------------------------------
# closed-form overlaps
# ---------------------------------------------------------------------------

def canonical_overlap_modulus(
    z_plus1: complex, z_minus1: complex, z_plus2: complex, z_minus2: complex
) -> float:
    """|<z1|z2>| = exp(-|z+1 - z+2|^2/2) exp(-|z-1 - z-2|^2/2)."""
    return math.exp(
        -0.5 * abs(z_plus1 - z_plus2) ** 2 - 0.5 * abs(z_minus1 - z_minus2) ** 2
    )


def su2_overlap(j: float, zeta1: complex, zeta2: complex) -> complex:
    """<zeta1|zeta2> = (1+|z1|^2)^-j (1+|z2|^2)^-j (1 + conj(z1) z2)^2j."""
    two_j = _check_spin(j)
    return (
        (1.0 + abs(zeta1) ** 2) ** (-j)
        * (1.0 + abs(zeta2) ** 2) ** (-j)
        * (1.0 + np.conj(zeta1) * zeta2) ** two_j
    )


def _bg_series(nu: float, w: float) -> float:
    """sum_m w^m / (m! Gamma(m+nu+1)) = I_nu(2 sqrt(w)) / w^{nu/2}."""
    if w == 0.0:
        return 1.0 / gamma_fn(nu + 1.0)
    return float(bessel("I", nu, 2.0 * math.sqrt(w))) / w ** (nu / 2.0)


def bg_overlap(ell: int, z1: float, z2: float) -> float:
    """Real-parameter BG overlap I_l(2 sqrt(z1 z2)) / sqrt(I_l(2z1) I_l(2z2))."""
    if z1 < 0 or z2 < 0:
        raise DomainError("closed-form BG overlap expects z >= 0")
    nu = float(abs(ell))
    return _bg_series(nu, z1 * z2) / math.sqrt(
        _bg_series(nu, z1 * z1) * _bg_series(nu, z2 * z2)
    )


def perelomov_overlap(ell: int, eta1: complex, eta2: complex) -> complex:
    """<eta1|eta2> = [(1-|eta1|^2)(1-|eta2|^2)]^{(|l|+1)/2} (1-conj(eta1) eta2)^{-|l|-1}."""
    if abs(eta1) >= 1 or abs(eta2) >= 1:
        raise EtaOutOfDisk("both parameters must lie inside the unit disk")
    k = 0.5 * (abs(ell) + 1)
    return (
        ((1.0 - abs(eta1) ** 2) * (1.0 - abs(eta2) ** 2)) ** k
        * (1.0 - np.conj(eta1) * eta2) ** (-(abs(ell) + 1))
    )


def _pa_bg_norm(k: float, n_add: int, abs_z: float) -> float:
    """Truncated-series normalization constant of a PA-BG state."""
    total = 0.0
    for m in range(_MAX_CUTOFF):
        log_term = (
            2 * m * math.log(abs_z) if abs_z > 0 else (0.0 if m == 0 else -math.inf)
        ) - math.log(float(_pa_bg_weight(k, n_add, np.array([m]))[0]))
        term = math.exp(log_term)
        total += term
        if m > 8 and term < 1e-18 * total:
            break
    return total**-0.5


def pa_bg_overlap(k: float, n1: int, n2: int, z1: complex, z2: complex) -> complex:
    """Closed-form overlap <z2, n2 | z1, n1> of two PA-BG states (n1 >= n2).

    M2 M1 conj(z2)^d Gamma(n1+1) Gamma(n1+2k) / (Gamma(2k) Gamma(d+1)
    Gamma(d+2k)) 2F3(n1+1, n1+2k; d+1, d+2k, 2k; conj(z2) z1), d = n1 - n2.
    """
    if n1 < n2:
        return complex(np.conj(pa_bg_overlap(k, n2, n1, z2, z1)))
    d = n1 - n2
    norm1 = _pa_bg_norm(k, n1, abs(z1))
    norm2 = _pa_bg_norm(k, n2, abs(z2))
    pref = gamma_fn(n1 + 1) * gamma_fn(n1 + 2 * k) / (
        gamma_fn(2 * k) * gamma_fn(d + 1) * gamma_fn(d + 2 * k)
    )
    series = hypergeometric(
        [n1 + 1, n1 + 2 * k], [d + 1, d + 2 * k, 2 * k], np.conj(z2) * z1
    )
    return norm1 * norm2 * np.conj(z2) ** d * pref * series


# ---------------------------------------------------------------------------
# single-mode configuration-space closed forms
# ---------------------------------------------------------------------------

def single_mode_wavefunction(
    family: str,
    ell: int,
    param,
    profile: ParameterProfile,
    aux: AuxiliarySolution,
    t: float,
    u,
    theta,
):
    """Closed-form radial profile of a single-diagonal coherent state.

    Variables: u = kappa r^2 / rho^2, beta = 1 - i M rho rho' / kappa.
    Families: "bg" (Bessel form, real z >= 0) and "perelomov"
    (Laguerre generating-function form, |eta| < 1).
    """
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("u must be nonnegative")
    a_ell = abs(int(ell))
    rho = float(aux.rho_at(t))
    rho_dot = float(aux.rho_dot_at(t))
    M = float(profile.mass(t))
    kap = profile.kappa
    beta = 1.0 - 1j * M * rho * rho_dot / kap
    pref = math.sqrt(kap / (math.pi * rho * rho)) * np.exp(1j * ell * np.asarray(theta))
    envelope = np.exp(-0.5 * beta * u)

    if family == "bg":
        z = param
        if abs(complex(z).imag) > 0 or complex(z).real < 0:
            raise DomainError("bg closed form expects real z >= 0")
        z = float(np.real(z))
        if z == 0.0:
            return pref * envelope * u ** (a_ell / 2.0) / math.sqrt(gamma_fn(a_ell + 1))
        body = (
            math.exp(z)
            * bessel("J", float(a_ell), 2.0 * np.sqrt(u * z))
            / math.sqrt(float(bessel("I", float(a_ell), 2.0 * z)))
        )
        return pref * envelope * body
    if family == "perelomov":
        eta = complex(param)
        if abs(eta) >= 1.0:
            raise EtaOutOfDisk(f"|eta| = {abs(eta)} must be < 1")
        if eta == 0:
            return pref * envelope * u ** (a_ell / 2.0) / math.sqrt(gamma_fn(a_ell + 1))
        body = (
            (1.0 - abs(eta) ** 2) ** (0.5 * (a_ell + 1))
            / math.sqrt(gamma_fn(a_ell + 1))
            * u ** (a_ell / 2.0)
            * np.exp(u * eta / (eta - 1.0))
            * (1.0 - eta) ** (-1.0 - a_ell)
        )
        return pref * envelope * body
    raise UnsupportedFamily(f"unknown single-mode family {family!r}")


# ---------------------------------------------------------------------------
# weight functions / moment problems
# ---------------------------------------------------------------------------

def _su2_pa_target(two_j: int, p: int) -> Callable[[int], float]:
    def target(m: int) -> float:
        return math.exp(
            2.0 * gammaln(m + 1)
            + gammaln(two_j - m - p + 1)
            - gammaln(two_j + 1)
            - gammaln(m + p + 1)
        )

    return target


def _hyp1f1_one(b: int, z: np.ndarray) -> np.ndarray:
    """1F1(1; b; z) for integer b >= 1, stable for large imaginary z.

    For b == 1 it is exp(z); otherwise (b-1)! z^{1-b} (e^z - sum_{j<b-1}
    z^j/j!), with the small-|z| region delegated to the direct series.
    """
    z = np.asarray(z, dtype=complex)
    if b == 1:
        return np.exp(z)
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(z) < 0.5
    if np.any(small):
        zs = z[small]
        acc = np.ones_like(zs)
        term = np.ones_like(zs)
        for m in range(1, 60):
            term = term * zs / (b - 1 + m)
            acc += term
        out[small] = acc
    big = ~small
    if np.any(big):
        zb = z[big]
        poly = np.zeros_like(zb)
        term = np.ones_like(zb)
        for jj in range(0, b - 1):
            poly += term
            term = term * zb / (jj + 1)
        out[big] = math.factorial(b - 1) * zb ** (1 - b) * (np.exp(zb) - poly)
    return out


def _char_function(k: float, l: int, y: np.ndarray) -> np.ndarray:
    """g(y) = sum_m F_l(k,m) (iy)^m / m!, the Fourier transform of the
    weight density.

    Equals Gamma(2k)/(Gamma(l+1) Gamma(2k+l)) 2F2(1, 1; l+1, 2k+l; iy).
    Small |y| uses the direct series; beyond the float cancellation range
    the 2F2 is an Euler integral over the closed-form confluent kernel.
    """
    b1 = l + 1
    b2 = int(round(2 * k)) + l
    pref = gamma_fn(2 * k) / (gamma_fn(b1) * gamma_fn(b2))
    out = np.empty(y.shape, dtype=complex)
    small = np.abs(y) <= 20.0
    if np.any(small):
        w = 1j * y[small]
        acc = np.ones_like(w)
        term = np.ones_like(w)
        for m in range(1, 400):
            term = term * w * (m / ((m + b1 - 1.0) * (m + b2 - 1.0)))
            acc += term
            if np.all(np.abs(term) < 1e-17 * np.max(np.abs(acc))):
                break
        out[small] = acc
    big = ~small
    if np.any(big):
        yb = y[big]
        if b2 == 1:
            out[big] = _hyp1f1_one(b1, 1j * yb)
        else:
            # 2F2(1,1;b1,b2;iy) = (b2-1) int_0^1 (1-t)^{b2-2} 1F1(1;b1;iyt) dt
            nodes, weights = np.polynomial.legendre.leggauss(16)
            y_top = float(np.max(np.abs(yb)))
            n_panels = max(8, int(y_top / 4.0) + 1)
            edges = np.linspace(0.0, 1.0, n_panels + 1)
            mids = 0.5 * (edges[:-1] + edges[1:])
            halves = 0.5 * np.diff(edges)
            t_nodes = (mids[:, None] + halves[:, None] * nodes).ravel()
            t_weights = (halves[:, None] * weights).ravel()
            base = (1.0 - t_nodes) ** (b2 - 2) * t_weights
            fvals = np.empty(yb.shape, dtype=complex)
            chunk = 256
            for start in range(0, yb.size, chunk):
                sl = slice(start, min(start + chunk, yb.size))
                zz = 1j * np.outer(yb[sl], t_nodes)
                fvals[sl] = (b2 - 1.0) * (_hyp1f1_one(b1, zz) @ base)
            out[big] = fvals
    return pref * out


def _pa_perelomov_density(k: float, l: int):
    """Numeric Fourier inversion of the PA-Perelomov weight on [0, 1.35].

    The Gaussian regulator smooths the density on a sigma = 2e-3 scale;
    mass smeared below x = 0 is folded back so the zeroth moment survives
    the support edge exactly:

        W(x) + W(-x) = (2/pi) int_0^inf Re g(y) exp(-eps y^2) cos(xy) dy.

    The evaluator is the tapered cosine sum itself (smooth in x); moment
    errors land a few times under the 1e-3 acceptance bar.
    """
    sigma = 2e-3
    eps = 0.5 * sigma**2
    y_max = math.sqrt(9.0 / eps)
    dy = 0.4
    y = np.arange(0.0, y_max, dy)
    g = _char_function(k, l, y) * np.exp(-eps * y * y)
    w_trap = np.full(y.size, dy)
    w_trap[0] *= 0.5
    coef = (2.0 / math.pi) * g.real * w_trap

    def evaluator(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        vals = np.clip(np.cos(np.outer(x, y)) @ coef, 0.0, None)
        vals[(x < 0.0) | (x > 1.35)] = 0.0
        return vals if vals.size > 1 else float(vals[0])

    return evaluator


def weight_spec(family: str, params: Mapping) -> WeightSpec:
    """Weight function and moment targets for a family's identity resolution.

    Families: "canonical" (f = 1), "su2_pa" (j, p), "bg_pa" (k, n),
    "perelomov_pa" (k, l).  Deformations with nonconstant f have no closed
    density here.
    """
    if family == "canonical":
        return WeightSpec(
            family=family,
            evaluator=lambda x: np.exp(-np.asarray(x, dtype=float)),
            moment_target=lambda m: gamma_fn(m + 1),
        )
    if family == "su2_pa":
        j, p = params["j"], params["p"]
        two_j = _check_spin(j)
        if p > two_j:
            raise UnsupportedFamily(
                f"p = {p} > 2j = {two_j}: no admissible moments remain"
            )
        g_spec = MeijerGSpec(
            m=2, n=1, p=2, q=2, a=(p - two_j - 1.0, float(p)), b=(0.0, 0.0)
        )
        norm = gamma_fn(two_j + 1)

        def evaluator(x):
            return meijer_g(g_spec, x) / norm

        return WeightSpec(
            family=family,
            evaluator=evaluator,
            moment_target=_su2_pa_target(two_j, p),
            m_max=two_j - p,
        )
    if family == "bg_pa":
        k, n_add = float(params["k"]), int(params["n"])
        _lattice_ell(("two_mode", k))
        g_spec = MeijerGSpec(
            m=4,
            n=0,
            p=2,
            q=4,
            a=(0.0, 2.0 * k - 1.0),
            b=(
                -float(n_add),
                -float(n_add),
                2.0 * k - 1.0 - n_add,
                2.0 * k - 1.0 - n_add,
            ),
        )

        def evaluator(x):
            return meijer_g(g_spec, x)

        def target(m: int) -> float:
            return float(_pa_bg_weight(k, n_add, np.array([m]))[0])

        return WeightSpec(
            family=family,
            evaluator=evaluator,
            moment_target=target,
            power_offset=n_add,
        )
    if family == "perelomov_pa":
        k, l = float(params["k"]), int(params["l"])
        _lattice_ell(("two_mode", k))

        def target(m: int) -> float:
            return float(_pa_weight_f(k, l, np.array([m]))[0])

        return WeightSpec(
            family=family,
            evaluator=_pa_perelomov_density(k, l),
            moment_target=target,
            m_max=8,
            x_max=1.35,
        )
    raise UnsupportedFamily(f"no weight function for family {family!r}")


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _param_value_to_json(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    return v


def state_to_json(s: StateVector) -> str:
    """Dump a state as {"family", "params", "cutoff", "coeffs"} JSON."""
    rows = []
    nz = np.argwhere(np.abs(s.coeffs) > 0)
    for n_p, n_m in nz:
        c = s.coeffs[n_p, n_m]
        rows.append([int(n_p), int(n_m), float(c.real), float(c.imag)])
    doc = {
        "family": s.family,
        "params": {k: _param_value_to_json(v) for k, v in s.params.items()},
        "cutoff": s.cutoff,
        "norm_deficit": s.norm_deficit,
        "coeffs": rows,
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def state_from_json(text: str) -> StateVector:
    """Inverse of state_to_json."""
    doc = json.loads(text)
    cutoff = int(doc["cutoff"])
    coeffs = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    for n_p, n_m, re, im in doc["coeffs"]:
        coeffs[int(n_p), int(n_m)] = re + 1j * im
    params = {
        k: (complex(v["re"], v["im"]) if isinstance(v, dict) and set(v) == {"re", "im"} else v)
        for k, v in doc.get("params", {}).items()
    }
    return StateVector(
        cutoff=cutoff,
        coeffs=coeffs,
        family=doc["family"],
        params=params,
        norm_deficit=float(doc.get("norm_deficit", 1.0 - np.sum(np.abs(coeffs) ** 2))),
    )
