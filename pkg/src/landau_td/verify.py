"""Cross-cutting numerical verification checks.

Each check packages one falsifiable claim about the rest of the package as
a :class:`CheckReport`:

- ``orthonormality_check``: Gram matrix of the polar eigenfunctions by 2D
  quadrature (Gauss-Legendre radial on the mapped envelope variable,
  trapezoid angular, which is exact for the trigonometric factors).
- ``schrodinger_residual_check``: pointwise residual ``i d(psi)/dt - H psi``
  of the phased solution, with the time derivative by central difference
  and spatial derivatives by 6th-order stencils.  Run once per phase
  convention (integrated, halved closed form, zeroed control).
- ``lr_invariant_check``: transport equation dI/dt + (1/i)[I, H] = 0 in the
  basis frozen at the evaluation time.  The invariant at displaced times is
  rebuilt from the frozen canonical matrices with scalar coefficients, so
  the central difference acts on coefficients, not on a rotating basis.
- ``algebra_check``: ladder, rotation, su(2) and su(1,1) commutators plus
  the su(1,1) Casimir on the truncated two-mode basis.
- ``moment_problem_check``: adaptive quadrature of weight-function moments
  against their factorial/Gamma targets (the scalar content of the
  resolution-of-identity claims).

All finite-difference steps and quadrature orders are fixed and recorded in
the report details, so a report is a pure function of its inputs.  Interior
blocks exclude two shells below the truncation edge throughout.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import sparse
from scipy.integrate import IntegrationWarning, quad
from scipy.sparse.linalg import norm as sparse_norm

from .auxode import AuxiliarySolution, solve_ep_numeric
from .coherent import WeightSpec
from .errors import (
    CutoffTooSmall,
    IntegralNonConvergent,
    QuadratureNonConvergent,
    StepUnderflow,
)
from .profiles import ParameterProfile, make_profile
from .spectrum import (
    HelicityQuanta,
    _drive_energy,
    basis_index,
    basis_labels,
    build_operator_matrices,
    interior_mask,
    phase_gamma,
    wavefunction_polar,
)

__all__ = [
    "CheckReport",
    "orthonormality_check",
    "schrodinger_residual_check",
    "lr_invariant_check",
    "algebra_check",
    "moment_problem_check",
    "standard_suite",
    "reports_to_json",
]

# 6th-order central stencils on 7 points
_C2 = np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / 180.0
_C1 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0
_OFFSETS = np.arange(-3, 4, dtype=float)

_INTERIOR_BAND = 2


@dataclass
class CheckReport:
    """Outcome of one verification check.

    ``passed`` is always ``max_residual <= tolerance``; ``details`` is a
    list of plain dictionaries (one row per sub-result) suitable for JSON.
    """

    name: str
    max_residual: float
    tolerance: float
    passed: bool
    details: List[Dict] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": self.details,
        }


def _make_report(name: str, max_residual: float, tol: float, details: List[Dict]) -> CheckReport:
    max_residual = float(max_residual)
    return CheckReport(
        name=name,
        max_residual=max_residual,
        tolerance=float(tol),
        passed=bool(max_residual <= tol),
        details=details,
    )


def _json_scalar(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"not JSON-serializable: {type(x)!r}")


def reports_to_json(reports: Sequence[CheckReport]) -> str:
    """Serialize a list of reports as a deterministic JSON array."""
    payload = [r.to_dict() for r in reports]
    return json.dumps(payload, indent=2, sort_keys=True, default=_json_scalar)


# ---------------------------------------------------------------------------
# orthonormality
# ---------------------------------------------------------------------------

def _gram_residual(
    profile: ParameterProfile,
    aux: AuxiliarySolution,
    t: float,
    states: Sequence[HelicityQuanta],
    n_radial: int,
    n_angular: int,
    u_max: float,
) -> float:
    """max |G - Id| for the Gram matrix on a (radial x angular) grid."""
    rho = float(aux.rho_at(t))
    kap = profile.kappa
    nodes, wts = leggauss(n_radial)
    u = 0.5 * u_max * (nodes + 1.0)
    w_u = 0.5 * u_max * wts
    r = rho * np.sqrt(u / kap)
    theta = np.linspace(0.0, 2.0 * math.pi, n_angular, endpoint=False)
    # area element r dr dtheta = (rho^2 / 2 kappa) du dtheta
    w2 = (rho * rho / (2.0 * kap)) * w_u[:, None] * (2.0 * math.pi / n_angular)
    phis = np.array(
        [
            wavefunction_polar(q, profile, aux, t, r[:, None], theta[None, :])
            for q in states
        ]
    )
    gram = np.einsum("ij,aij,bij->ab", w2, phis.conj(), phis)
    return float(np.max(np.abs(gram - np.eye(len(states)))))


def orthonormality_check(
    profile: ParameterProfile,
    aux: AuxiliarySolution,
    t: float,
    n_max: int = 3,
    tol: float = 1e-7,
    n_radial: Optional[int] = None,
    n_angular: Optional[int] = None,
) -> CheckReport:
    """Gram-matrix orthonormality of all eigenfunctions with n+, n- <= n_max.

    The radial integral runs in the envelope variable u = kappa r^2 / rho^2
    on [0, u_max] (Gauss-Legendre, with u_max scaled so the discarded tail
    is negligible), the angular one on a uniform grid (trapezoid, exact for
    the finitely many harmonics present).  The grid is refined once; if the
    refined residual would pass the tolerance but the refinement still
    shifts it by more than tol/2, the result is not trusted and
    QuadratureNonConvergent is raised.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if n_max > 6:
        raise ValueError("n_max > 6 exceeds the quadrature design range")
    profile.check_time(t)

    if n_radial is None:
        n_radial = 40 + 6 * n_max
    if n_angular is None:
        n_angular = 8 * (n_max + 1)
    u_max = 24.0 + 8.0 * n_max
    states = [
        HelicityQuanta(np_, nm_)
        for np_ in range(n_max + 1)
        for nm_ in range(n_max + 1)
    ]

    coarse = _gram_residual(profile, aux, t, states, n_radial, n_angular, u_max)
    n_radial_f = int(1.5 * n_radial) + 8
    n_angular_f = 2 * n_angular
    refined = _gram_residual(profile, aux, t, states, n_radial_f, n_angular_f, u_max)
    shift = abs(refined - coarse)
    if refined <= tol < 2.0 * shift:
        raise QuadratureNonConvergent(
            f"refinement moved the Gram residual by {shift:.3e}, "
            f"more than half the tolerance {tol:.3e}"
        )
    details = [
        {
            "states": len(states),
            "radial_nodes": n_radial_f,
            "angular_nodes": n_angular_f,
            "u_max": u_max,
            "coarse_residual": float(coarse),
            "quadrature_shift": float(shift),
        }
    ]
    return _make_report("orthonormality", refined, tol, details)


# ---------------------------------------------------------------------------
# Schroedinger residual
# ---------------------------------------------------------------------------

def _time_step(profile: ParameterProfile, t: float) -> float:
    h = 1e-5 * profile.span
    if t + h == t or t - h == t:
        raise StepUnderflow(
            f"time step {h:.3e} is below the floating-point resolution at t = {t}"
        )
    return h


def schrodinger_residual_check(
    q: HelicityQuanta,
    profile: ParameterProfile,
    aux: AuxiliarySolution,
    sample_points: Sequence[Tuple[float, float, float]],
    tol: float = 1e-4,
) -> CheckReport:
    """Residual max |i d(psi)/dt - H psi| / max |psi| at sample points.

    ``sample_points`` is a sequence of (t, r, theta) triples strictly inside
    the domain (r > 0, t away from the window ends by the time step).  The
    residual is evaluated under three phase conventions: the integrated
    phase (authoritative), the halved-first-term closed form (comparison),
    and gamma = 0 (control).  ``max_residual`` reports the integrated one;
    all three appear in the details.
    """
    samples = list(sample_points)
    if not samples:
        raise ValueError("need at least one sample point")
    conventions = ("integrated", "closed_form", "zeroed")
    resid = {c: [] for c in conventions}
    amp = []
    steps_r = []
    h_theta = 0.02
    h_t = None

    for (t, r, theta) in samples:
        t, r, theta = float(t), float(r), float(theta)
        if r <= 0.0:
            raise ValueError("sample radius must be positive")
        h_t = _time_step(profile, t)
        profile.check_time(t - h_t)
        profile.check_time(t + h_t)

        rho = float(aux.rho_at(t))
        M = float(profile.mass(t))
        Om = float(profile.Omega(t))
        omega_c = float(profile.omega_c(t))
        drive = _drive_energy(profile, t)

        h_r = 0.01 * rho / math.sqrt(profile.kappa)
        if r - 3.0 * h_r <= 0.0:
            h_r = 0.25 * r
        steps_r.append(h_r)

        psi_r = wavefunction_polar(q, profile, aux, t, r + h_r * _OFFSETS, theta)
        psi_th = wavefunction_polar(q, profile, aux, t, r, theta + h_theta * _OFFSETS)
        psi_0 = psi_r[3]
        d2r = _C2 @ psi_r / h_r**2
        d1r = _C1 @ psi_r / h_r
        d2t = _C2 @ psi_th / h_theta**2
        d1t = _C1 @ psi_th / h_theta
        laplacian = d2r + d1r / r + d2t / r**2
        # the rotation generator has eigenvalue n- - n+ on exp(i(n+ - n-)theta),
        # so its differential representation here is +i d/dtheta
        h_psi = (
            -laplacian / (2.0 * M)
            + 0.5 * M * Om * Om * r * r * psi_0
            - 0.5 * omega_c * (1j * d1t)
            - drive * psi_0
        )

        stencil_t = np.array([t - h_t, t, t + h_t])
        trace = phase_gamma(q, profile, aux, stencil_t)
        psi_minus = wavefunction_polar(q, profile, aux, t - h_t, r, theta)
        psi_plus = wavefunction_polar(q, profile, aux, t + h_t, r, theta)
        phases = {
            "integrated": trace.gamma - trace.gamma[1],
            "closed_form": trace.gamma_closed_form - trace.gamma_closed_form[1],
            "zeroed": np.zeros(3),
        }
        for conv in conventions:
            g = phases[conv]
            dpsi_dt = (
                np.exp(1j * g[2]) * psi_plus - np.exp(1j * g[0]) * psi_minus
            ) / (2.0 * h_t)
            resid[conv].append(abs(1j * dpsi_dt - h_psi))
        amp.append(abs(psi_0))

    scale = max(amp)
    rel = {c: max(resid[c]) / scale for c in conventions}
    details = [{"convention": c, "residual": float(rel[c])} for c in conventions]
    details.append(
        {
            "samples": len(samples),
            "step_t": float(h_t),
            "step_theta": h_theta,
            "step_r": [float(h) for h in steps_r],
        }
    )
    return _make_report("schrodinger_residual", rel["integrated"], tol, details)


# ---------------------------------------------------------------------------
# invariant transport equation
# ---------------------------------------------------------------------------

def lr_invariant_check(
    profile: ParameterProfile,
    aux: AuxiliarySolution,
    t: float,
    cutoff: int = 40,
    tol: float = 1e-6,
) -> CheckReport:
    """Frobenius residual of dI/dt + (1/i)[I, H] on the interior block.

    All operators are expressed in the eigenbasis frozen at time t.  In
    that basis I(t) is exactly diagonal, while I at displaced times is
    rebuilt from the frozen canonical matrices,

        I(t') = 1/2 [ (kappa^2/rho'^2 + (M' rho_dot')^2)(x^2 + y^2)
                      + rho'^2 (px^2 + py^2)
                      - M' rho' rho_dot' ({x,px} + {y,py}) ],

    so the central time difference acts on scalar coefficients only.  The
    residual is reported relative to the Frobenius norm of I.
    """
    if cutoff < 10:
        raise CutoffTooSmall(f"cutoff must be >= 10, got {cutoff}")
    h = _time_step(profile, t)
    profile.check_time(t - h)
    profile.check_time(t + h)

    mats = build_operator_matrices(profile, aux, t, cutoff)
    x = mats["x"].entries
    y = mats["y"].entries
    px = mats["px"].entries
    py = mats["py"].entries
    ham = mats["H"].entries
    inv = mats["I"].entries
    lz = mats["Lz"].entries
    kap = profile.kappa

    q2 = x @ x + y @ y
    p2 = px @ px + py @ py
    cross = x @ px + px @ x + y @ py + py @ y

    def invariant_at(tp: float):
        rho = float(aux.rho_at(tp))
        rho_dot = float(aux.rho_dot_at(tp))
        mass = float(profile.mass(tp))
        a = kap * kap / rho**2 + (mass * rho_dot) ** 2
        return 0.5 * (a * q2 + rho**2 * p2 - mass * rho * rho_dot * cross)

    didt = (invariant_at(t + h) - invariant_at(t - h)) / (2.0 * h)
    commutator = (inv @ ham - ham @ inv) / 1j
    residual_mat = didt + commutator

    idx = np.nonzero(interior_mask(cutoff, _INTERIOR_BAND))[0]

    def block(mat) -> sparse.csr_matrix:
        return mat.tocsr()[idx][:, idx]

    inv_norm = float(sparse_norm(block(inv)))
    res_norm = float(sparse_norm(block(residual_mat)))
    rel = res_norm / inv_norm

    recon = block(invariant_at(t) - inv)
    recon_dev = float(np.max(np.abs(recon.toarray()))) if recon.nnz else 0.0
    lz_comm = block(inv @ lz - lz @ inv)
    lz_dev = float(np.max(np.abs(lz_comm.data))) if lz_comm.nnz else 0.0

    details = [
        {
            "step_t": float(h),
            "band": _INTERIOR_BAND,
            "interior_dim": int(idx.size),
            "invariant_norm": inv_norm,
            "transport_norm": float(sparse_norm(block(didt))),
            "commutator_norm": float(sparse_norm(block(commutator))),
            "frozen_reconstruction": recon_dev,
            "lz_commutator": lz_dev,
        }
    ]
    return _make_report("lr_invariant", rel, tol, details)


# ---------------------------------------------------------------------------
# commutator algebra
# ---------------------------------------------------------------------------

def _algebra_fixture(cutoff: int):
    """Generic profile and off-equilibrium aux solution for the algebra run.

    The commutation relations hold for any (rho, rho_dot, M, kappa); an
    oscillating rho with rho_dot != 0 exercises the full ladder inversion
    rather than the stationary special case.
    """
    profile = make_profile(
        "constant",
        {"M": 1.0, "omega": 1.0, "E1": 0.0, "E2": 0.0},
        q=1.0,
        B=0.8,
        kappa=1.3,
        t0=0.0,
        t1=4.0,
    )
    grid = np.linspace(0.0, 4.0, 161)
    aux = solve_ep_numeric(profile, 1.25, 0.2, grid)
    return profile, aux, 1.7


def algebra_check(cutoff: int = 20, tol: float = 1e-10) -> CheckReport:
    """Commutator and Casimir identities on the truncated two-mode basis.

    Checks the canonical pairs, the rotation generator acting on the
    helicity ladders ([Lz, a+-] = +-a+-), the su(2) and su(1,1) triples,
    [I, Lz] = 0, the su(1,1) Casimir K0^2 - (K+K- + K-K+)/2 against
    (l+1)(l-1)/4 on fixed-l subspaces, and the lowest nontrivial su(2)
    raising amplitude.  Residuals are interior-block max-abs values.
    """
    if cutoff < 6:
        raise CutoffTooSmall(f"cutoff must be >= 6, got {cutoff}")
    profile, aux, t = _algebra_fixture(cutoff)
    mats = {k: v.entries for k, v in build_operator_matrices(profile, aux, t, cutoff).items()}
    dim = (cutoff + 1) ** 2
    ident = sparse.identity(dim, format="csr", dtype=complex)
    idx = np.nonzero(interior_mask(cutoff, _INTERIOR_BAND))[0]

    def comm(a, b):
        return a @ b - b @ a

    def masked_max(mat) -> float:
        blk = mat.tocsr()[idx][:, idx]
        return float(np.max(np.abs(blk.data))) if blk.nnz else 0.0

    labels = basis_labels(cutoff)
    ell = labels[:, 0] - labels[:, 1]
    casimir = (
        mats["K0"] @ mats["K0"]
        - 0.5 * (mats["K+"] @ mats["K-"] + mats["K-"] @ mats["K+"])
    )
    casimir_target = sparse.diags(0.25 * (ell.astype(float) ** 2 - 1.0)).tocsr()

    items = [
        ("[a+, a+dag] - 1", comm(mats["a+"], mats["a+dag"]) - ident),
        ("[a-, a-dag] - 1", comm(mats["a-"], mats["a-dag"]) - ident),
        ("[a+, a-]", comm(mats["a+"], mats["a-"])),
        ("[a+, a-dag]", comm(mats["a+"], mats["a-dag"])),
        ("[x, px] - i", comm(mats["x"], mats["px"]) - 1j * ident),
        ("[y, py] - i", comm(mats["y"], mats["py"]) - 1j * ident),
        ("[x, y]", comm(mats["x"], mats["y"])),
        ("[px, py]", comm(mats["px"], mats["py"])),
        ("[x, py]", comm(mats["x"], mats["py"])),
        ("[y, px]", comm(mats["y"], mats["px"])),
        ("[Lz, a+] - a+", comm(mats["Lz"], mats["a+"]) - mats["a+"]),
        ("[Lz, a-] + a-", comm(mats["Lz"], mats["a-"]) + mats["a-"]),
        ("[J3, J+] - J+", comm(mats["J3"], mats["J+"]) - mats["J+"]),
        ("[J3, J-] + J-", comm(mats["J3"], mats["J-"]) + mats["J-"]),
        ("[J+, J-] - 2 J3", comm(mats["J+"], mats["J-"]) - 2.0 * mats["J3"]),
        ("[K0, K+] - K+", comm(mats["K0"], mats["K+"]) - mats["K+"]),
        ("[K0, K-] + K-", comm(mats["K0"], mats["K-"]) + mats["K-"]),
        ("[K-, K+] - 2 K0", comm(mats["K-"], mats["K+"]) - 2.0 * mats["K0"]),
        ("[I, Lz]", comm(mats["I"], mats["Lz"])),
        ("casimir - (l^2 - 1)/4", casimir - casimir_target),
    ]
    details = [{"identity": name, "residual": masked_max(mat)} for name, mat in items]

    jp_amp = mats["J+"][basis_index(1, 0, cutoff), basis_index(0, 1, cutoff)]
    details.append(
        {"identity": "J+ amplitude (0,1) -> (1,0)", "residual": float(abs(jp_amp - 1.0))}
    )

    worst = max(row["residual"] for row in details)
    return _make_report("algebra", worst, tol, details)


# ---------------------------------------------------------------------------
# moment problems
# ---------------------------------------------------------------------------

def moment_problem_check(spec: WeightSpec, m_max: int = 6, tol: float = 1e-6) -> CheckReport:
    """Weight-function moments against their targets by adaptive quadrature.

    For each admissible order m, integrates x^(m + power_offset) times the
    evaluator over (0, x_max or infinity) and compares with
    ``spec.moment_target(m)`` in relative terms.  If a moment would pass
    the tolerance but the quadrature error estimate is larger than half of
    the allowed discrepancy, the value is not trusted and
    IntegralNonConvergent is raised.
    """
    m_hi = m_max if spec.m_max is None else min(m_max, spec.m_max)
    if m_hi < spec.m_min:
        raise ValueError(f"no admissible moment orders in [{spec.m_min}, {m_hi}]")
    upper = np.inf if spec.x_max is None else spec.x_max

    details = []
    worst = 0.0
    for m in range(spec.m_min, m_hi + 1):
        power = m + spec.power_offset

        def integrand(xv, p=power):
            return xv**p * spec.evaluator(xv)

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            value, err = quad(
                integrand, 0.0, upper, limit=300, epsabs=1e-12, epsrel=1e-12
            )
        target = float(spec.moment_target(m))
        scale = max(abs(target), abs(value), 1e-300)
        rel = abs(value - target) / scale
        # the error estimate is conservative for smooth integrands, so the
        # certification bar never drops below 1e-9 relative
        if rel <= tol and err / scale > max(0.5 * tol, 1e-9):
            raise IntegralNonConvergent(
                f"moment m = {m}: quadrature error estimate {err:.3e} "
                f"too large to certify tolerance {tol:.3e}"
            )
        worst = max(worst, rel)
        details.append(
            {
                "order": m,
                "power": power,
                "value": float(value),
                "target": target,
                "rel_error": float(rel),
                "quad_error": float(err),
            }
        )
    return _make_report(f"moments_{spec.family}", worst, tol, details)


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------

def standard_suite(
    profile: ParameterProfile,
    aux: AuxiliarySolution,
    checks: Optional[Sequence[str]] = None,
) -> List[CheckReport]:
    """Run a fixed battery of checks against one (profile, aux) pair.

    ``checks`` selects a subset of {"orthonormality", "schrodinger",
    "invariant", "algebra", "moments"}; the default runs all five.  Sizes
    are chosen for interactive latency rather than maximum stringency.
    """
    from .coherent import weight_spec  # local import to avoid cycle at module load

    known = ("orthonormality", "schrodinger", "invariant", "algebra", "moments")
    if checks is None:
        checks = known
    unknown = sorted(set(checks) - set(known))
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(unknown)}")

    t_mid = 0.5 * (profile.t0 + profile.t1)
    reports: List[CheckReport] = []
    if "orthonormality" in checks:
        reports.append(orthonormality_check(profile, aux, t_mid, n_max=2, tol=1e-7))
    if "schrodinger" in checks:
        scale = float(aux.rho_at(t_mid)) / math.sqrt(profile.kappa)
        samples = [
            (t_mid, 0.7 * scale, 0.4),
            (t_mid, 1.2 * scale, 2.0),
        ]
        reports.append(
            schrodinger_residual_check(
                HelicityQuanta(1, 0), profile, aux, samples, tol=1e-3
            )
        )
    if "invariant" in checks:
        reports.append(lr_invariant_check(profile, aux, t_mid, cutoff=24, tol=1e-6))
    if "algebra" in checks:
        reports.append(algebra_check(cutoff=16, tol=1e-10))
    if "moments" in checks:
        reports.append(
            moment_problem_check(weight_spec("canonical", {}), m_max=6, tol=1e-8)
        )
        reports.append(
            moment_problem_check(
                weight_spec("su2_pa", {"j": 1.5, "p": 1}), m_max=6, tol=1e-5
            )
        )
    return reports
