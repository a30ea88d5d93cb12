"""Simple-laminate geometry attached to a 1D interface trajectory.

Martensite occupies ``{x . n < u(t)}`` with macroscopic gradient
``lam A + (1 - lam) B = I + a (x) n``; austenite occupies the rest and is
undeformed.  The deformation is

    y(x) = x + a (x . n) + c1   (martensite)
    y(x) = x + c2               (austenite)

and continuity across ``x . n = u`` forces ``c2 - c1 = a u``.  The gauge
``c2 = 0`` is used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import Grid1D, InterfaceTrajectory
from .errors import IncompatibleSpec, LambdaOutOfRange, NotRankOne

RANK_TOL = 1e-10
ZERO_TOL = 1e-14
CONTINUITY_TOL = 1e-12


def _normalize_sign(n: np.ndarray) -> np.ndarray:
    for comp in n:
        if abs(comp) > ZERO_TOL:
            return n if comp > 0 else -n
    return n


@dataclass(frozen=True)
class RankOne:
    a: np.ndarray
    n: np.ndarray
    sigma2: float
    degenerate: bool = False


def extract_rank_one(M, rank_tol: float = RANK_TOL) -> RankOne:
    """Write ``M - I = a (x) n`` with ``|n| = 1`` and the first nonzero entry of ``n`` positive.

    The identity maps to ``a = 0``, ``n = e1`` and is flagged degenerate.
    Raises :class:`NotRankOne` when ``sigma_2 > rank_tol * sigma_1``.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (3, 3) or not np.all(np.isfinite(M)):
        raise ValueError("expected a finite 3x3 matrix")
    D = M - np.eye(3)
    U, s, Vt = np.linalg.svd(D)
    if s[0] <= ZERO_TOL:
        return RankOne(np.zeros(3), np.array([1.0, 0.0, 0.0]), float(s[1]), degenerate=True)
    if s[1] > rank_tol * s[0]:
        raise NotRankOne(float(s[1]))
    n = _normalize_sign(Vt[0].copy())
    n = n / np.linalg.norm(n) + 0.0  # no negative zeros
    a = D @ n
    return RankOne(a, n, float(s[1]))


def barycenter(A, B, lam: float) -> np.ndarray:
    """Macroscopic gradient ``lam A + (1 - lam) B`` of the two-atom Young measure."""
    if not 0.0 <= lam <= 1.0:
        raise LambdaOutOfRange(f"volume fraction {lam} outside [0, 1]")
    return lam * np.asarray(A, dtype=float) + (1.0 - lam) * np.asarray(B, dtype=float)


@dataclass
class LaminateSpec:
    A: np.ndarray
    B: np.ndarray
    lam: float
    a: np.ndarray = field(default=None)
    n: np.ndarray = field(default=None)
    sigma2: float = 0.0
    degenerate: bool = False

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float).reshape(3, 3)
        self.B = np.asarray(self.B, dtype=float).reshape(3, 3)
        try:
            r = extract_rank_one(barycenter(self.A, self.B, self.lam))
        except NotRankOne as err:
            raise IncompatibleSpec(err.sigma2) from None
        self.a, self.n, self.sigma2, self.degenerate = r.a, r.n, r.sigma2, r.degenerate
        if self.degenerate:
            # zero shear: any normal works; keep the laminate's x3 layering
            self.n = np.array([0.0, 0.0, 1.0])

    @property
    def gradient(self) -> np.ndarray:
        return np.eye(3) + np.outer(self.a, self.n)

    def compatibility_error(self) -> float:
        return float(np.max(np.abs(barycenter(self.A, self.B, self.lam) - self.gradient)))

    @classmethod
    def from_shear(cls, a, n, lam: float, B=None) -> "LaminateSpec":
        """Build ``A`` so the barycenter equals ``I + a (x) n`` for a given ``B`` (default ``I``)."""
        a = np.asarray(a, dtype=float)
        n = np.asarray(n, dtype=float) / np.linalg.norm(n)
        B = np.eye(3) if B is None else np.asarray(B, dtype=float)
        if not 0.0 < lam <= 1.0:
            raise LambdaOutOfRange(f"volume fraction {lam} must be in (0, 1] to solve for A")
        A = (np.eye(3) + np.outer(a, n) - (1.0 - lam) * B) / lam
        return cls(A, B, lam)


@dataclass
class DeformationSnapshot:
    t: float
    u: float
    c1: np.ndarray
    c2: np.ndarray
    a: np.ndarray
    n: np.ndarray

    def __call__(self, x) -> np.ndarray:
        """Deformed positions for points ``x`` of shape ``(..., 3)``."""
        x = np.asarray(x, dtype=float)
        h = x @ self.n
        mart = (h < self.u)[..., None]
        return np.where(mart, x + np.multiply.outer(h, self.a) + self.c1, x + self.c2)

    def gradient_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x @ self.n < self.u:
            return np.eye(3) + np.outer(self.a, self.n)
        return np.eye(3)

    def continuity_gap(self) -> float:
        """``|(c2 - c1) - a u|``, zero for a continuous map."""
        return float(np.max(np.abs((self.c2 - self.c1) - self.a * self.u)))

    def lipschitz_bound(self) -> float:
        return 1.0 + float(np.linalg.norm(self.a))


def reconstruct_deformation(trajectory: InterfaceTrajectory, spec: LaminateSpec) -> list[DeformationSnapshot]:
    """Piecewise-affine deformation at each trajectory sample with gauge ``c2 = 0``."""
    out = []
    for t, u in zip(trajectory.t, trajectory.u):
        c1 = -spec.a * u
        out.append(DeformationSnapshot(float(t), float(u), c1, np.zeros(3), spec.a, spec.n))
    return out


def sign_convention(snapshot: DeformationSnapshot) -> str:
    """Which translation relation the snapshot satisfies: ``"c2-c1=a*u"``, ``"c1-c2=a*u"``, both or neither."""
    d = snapshot.c2 - snapshot.c1
    au = snapshot.a * snapshot.u
    ok_cont = np.allclose(d, au, rtol=0, atol=CONTINUITY_TOL)
    ok_other = np.allclose(-d, au, rtol=0, atol=CONTINUITY_TOL)
    if ok_cont and ok_other:
        return "both"
    if ok_cont:
        return "c2-c1=a*u"
    if ok_other:
        return "c1-c2=a*u"
    return "neither"


def entropy_barycenter(grid: Grid1D, u: float, alpha: float, theta_T: float, normalized: bool = True) -> np.ndarray:
    """Nodal values of the averaged entropy well ``eta_1``.

    ``-alpha`` (or ``-alpha / theta_T`` when ``normalized`` is false) on the
    martensite nodes, zero elsewhere; the jump sits at the node nearest ``u``.
    """
    value = -alpha if normalized else -alpha / theta_T
    jump = int(round(u / grid.ds))
    out = np.zeros(grid.n_nodes)
    out[:jump] = value
    return out


def _martensite_integral(psi: np.ndarray, grid: Grid1D, u: float) -> float:
    """Integral of the piecewise-linear interpolant of ``psi`` over ``(0, u)``."""
    ds = grid.ds
    j, xi = grid.locate(u)
    full = ds * (0.5 * psi[0] + np.sum(psi[1:j]) + 0.5 * psi[j]) if j > 0 else 0.0
    psi_u = (1.0 - xi) * psi[j] + xi * psi[j + 1]
    return float(full + 0.5 * xi * ds * (psi[j] + psi_u))


def entropy_source_identity(trajectory: InterfaceTrajectory, psi, grid: Grid1D, alpha: float = 1.0, theta_T: Optional[float] = None) -> np.ndarray:
    """Residual of ``d/dt int_0^u psi = u' psi(u)`` along the trajectory, times the entropy jump.

    The left side is a forward difference of the martensite integral between
    consecutive samples; the right side uses the recorded velocity ``v_k``
    (which drives ``u_k -> u_{k+1}``) and the interpolated ``psi(u_k)``.  The
    series is scaled by ``alpha`` (``alpha / theta_T`` if ``theta_T`` is given).
    """
    scale = alpha if theta_T is None else alpha / theta_T
    values = psi(grid.nodes) if callable(psi) else np.asarray(psi, dtype=float)
    a = trajectory.arrays()
    t, u, v = a["t"], a["u"], a["v"]
    if len(t) < 2:
        return np.zeros(0)
    F = np.array([_martensite_integral(values, grid, x) for x in u])
    lhs = np.diff(F) / np.diff(t)
    psi_u = np.array([(1 - xi) * values[j] + xi * values[j + 1] for j, xi in (grid.locate(x) for x in u[:-1])])
    rhs = v[:-1] * psi_u
    return scale * (lhs - rhs)


@dataclass
class MMReport:
    mm1: bool
    mm2: bool
    mm3: bool
    mm4: bool
    convention: str
    details: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return self.mm1 and self.mm2 and self.mm3 and self.mm4

    def to_dict(self) -> dict:
        return {
            "MM1": self.mm1,
            "MM2": self.mm2,
            "MM3": self.mm3,
            "MM4": self.mm4,
            "all_pass": self.all_pass,
            "translation_convention": self.convention,
            "details": self.details,
        }


def moving_mask_audit(
    trajectory: InterfaceTrajectory,
    spec: LaminateSpec,
    L: float = 1.0,
    v_max: Optional[float] = None,
    spec_history: Optional[list] = None,
    n_probe: int = 33,
) -> MMReport:
    """Check the four moving-mask properties on the reconstructed deformation.

    MM1: the two regions split the sample at the interface.  MM2: the
    gradient is the identity on the austenite side.  MM3: the interface moves
    continuously, i.e. ``|du| <= v_max dt`` between samples (``v_max``
    defaults to the largest recorded ``|v|``).  MM4: the laminate data stay
    constant in time (``spec_history`` lists the spec at each sample).
    """
    snaps = reconstruct_deformation(trajectory, spec)
    a = trajectory.arrays()
    probes = np.linspace(0.0, L, n_probe)
    details = {}

    # MM1: every probe lies in exactly one of martensite, austenite, interface
    mm1 = bool(np.all((a["u"] >= 0) & (a["u"] <= L)))
    for snap in snaps:
        mart, aust, on = probes < snap.u, probes > snap.u, probes == snap.u
        if not np.all(mart.astype(int) + aust + on == 1):
            mm1 = False
            break

    mm2 = True
    worst_cont = 0.0
    for snap in snaps:
        worst_cont = max(worst_cont, snap.continuity_gap())
        # austenite points may only be translated rigidly by c2
        X = np.outer(probes[probes > snap.u], snap.n)
        if len(X) and not np.allclose(snap(X) - X, snap.c2, rtol=0, atol=CONTINUITY_TOL):
            mm2 = False
    details["max_continuity_gap"] = worst_cont

    if v_max is None:
        v_max = float(np.max(np.abs(a["v"]))) if len(a["v"]) else 0.0
    bad = trajectory.lipschitz_violations(v_max, L)
    mm3 = not bad
    details["mm3_violations"] = bad[:10]
    details["v_max"] = v_max

    mm4 = True
    if spec_history is not None:
        for other in spec_history:
            same = (
                np.array_equal(other.A, spec.A)
                and np.array_equal(other.B, spec.B)
                and other.lam == spec.lam
                and np.array_equal(other.a, spec.a)
            )
            if not same:
                mm4 = False
                break
    convention = sign_convention(snaps[0]) if snaps else "n/a"
    if snaps and any(sign_convention(s) != convention for s in snaps):
        convention = "mixed"
    return MMReport(mm1, mm2, mm3, mm4, convention, details)


def random_compatible_spec(rng: np.random.Generator, shear_scale: float = 1.0, a_norm: Optional[float] = None) -> tuple[LaminateSpec, np.ndarray]:
    """Random laminate whose barycenter is ``I + a (x) n`` by construction.

    ``a`` is Gaussian with scale ``shear_scale``, or a random direction of
    length ``a_norm`` if that is given.  Returns the spec and the planted
    ``a (x) n`` for round-trip checks.
    """
    a = shear_scale * rng.standard_normal(3)
    if a_norm is not None:
        a *= a_norm / np.linalg.norm(a)
    n = rng.standard_normal(3)
    n /= np.linalg.norm(n)
    lam = float(rng.uniform(0.05, 1.0))
    B = np.eye(3) + 0.3 * rng.standard_normal((3, 3))
    return LaminateSpec.from_shear(a, n, lam, B), np.outer(a, n)
