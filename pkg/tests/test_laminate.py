import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stefan_kinetic.core import Grid1D, InterfaceTrajectory
from stefan_kinetic.errors import IncompatibleSpec, LambdaOutOfRange, NotRankOne
from stefan_kinetic.laminate import (
    LaminateSpec, barycenter, entropy_barycenter, entropy_source_identity, extract_rank_one, moving_mask_audit,
    random_compatible_spec, reconstruct_deformation, sign_convention,
)

E1, E3 = np.eye(3)[0], np.eye(3)[2]
vec = st.lists(st.floats(-10, 10), min_size=3, max_size=3).map(np.array)


def smooth_trajectory(m=65):
    t = np.linspace(0.0, 1.0, m)
    return InterfaceTrajectory.from_arrays(t, 0.3 + 0.1 * t, v=np.full(m, 0.1))


def test_identity_is_degenerate():
    r = extract_rank_one(np.eye(3))
    assert r.degenerate and np.all(r.a == 0) and np.array_equal(r.n, E1)


def test_constructed_shear():
    r = extract_rank_one(np.eye(3) + np.outer([0.1, 0.2, 0.0], E3))
    assert np.allclose(r.a, [0.1, 0.2, 0.0], atol=1e-15) and np.allclose(r.n, E3, atol=1e-15)


def test_rank_two_rejected_with_sigma2(rng):
    a1, n1, a2, n2 = rng.standard_normal((4, 3))
    M = np.eye(3) + np.outer(a1, n1) + np.outer(a2, n2)
    with pytest.raises(NotRankOne) as err:
        extract_rank_one(M)
    # independent: second singular value from the eigenvalues of D^T D
    D = M - np.eye(3)
    sigma2 = np.sqrt(np.sort(np.linalg.eigvalsh(D.T @ D))[::-1][1])
    assert err.value.sigma2 == pytest.approx(sigma2, rel=1e-8)


@settings(max_examples=200)
@given(vec, vec)
def test_rank_one_round_trip(a, n):
    if np.linalg.norm(a) < 1e-3 or np.linalg.norm(n) < 1e-3:
        return
    n = n / np.linalg.norm(n)
    r = extract_rank_one(np.eye(3) + np.outer(a, n))
    assert np.linalg.norm(r.n) == pytest.approx(1.0)
    assert np.allclose(np.outer(r.a, r.n), np.outer(a, n), atol=1e-10)
    first = r.n[np.abs(r.n) > 1e-14][0]
    assert first > 0


def test_barycenter_endpoints_and_linearity():
    a = np.array([0.1, -0.2, 0.3])
    A = np.eye(3) + 2 * np.outer(a, E3)
    assert np.array_equal(barycenter(A, np.eye(3), 0.0), np.eye(3))
    assert np.array_equal(barycenter(A, np.eye(3), 1.0), A)
    assert np.allclose(barycenter(A, np.eye(3), 0.5), np.eye(3) + np.outer(a, E3))
    with pytest.raises(LambdaOutOfRange):
        barycenter(A, np.eye(3), 1.5)


@given(st.floats(0.01, 1.0))
def test_barycenter_commutes_with_extraction(lam):
    a = np.array([0.3, 0.0, -0.4])
    r = extract_rank_one(barycenter(np.eye(3) + 2 * np.outer(a, E3), np.eye(3), lam))
    assert np.allclose(np.outer(r.a, r.n), np.outer(2 * lam * a, E3), atol=1e-12)


def test_incompatible_spec():
    A = np.eye(3) + np.outer(E1, E3)
    B = np.eye(3) + np.outer(E3, E1)
    with pytest.raises(IncompatibleSpec):
        LaminateSpec(A, B, 0.5)


def test_spec_compatibility_error(rng):
    for _ in range(20):
        spec, planted = random_compatible_spec(rng)
        assert spec.compatibility_error() <= 1e-12


def test_deformation_examples():
    spec = LaminateSpec.from_shear([0.1, 0, 0], E3, 0.5)
    traj = InterfaceTrajectory.from_arrays([0.0, 1.0, 2.0], [0.0, 0.5, 1.0])
    s0, s1, s2 = reconstruct_deformation(traj, spec)
    x = np.array([[0.2, 0.3, 0.4], [0.1, 0.1, 0.9]])
    assert np.all(s0.c1 == 0) and np.allclose(s0(x), x)
    assert np.allclose(s1.c1, [-0.05, 0, 0], atol=1e-16)
    eps = 1e-15
    below = s1(np.array([0.0, 0.0, 0.5 - eps]))
    above = s1(np.array([0.0, 0.0, 0.5]))
    assert np.allclose(below, above, atol=1e-15)
    assert np.allclose(s2(x), x + np.outer(x @ E3, spec.a) + s2.c1)


def test_sign_convention_reports_continuity():
    spec = LaminateSpec.from_shear([0.1, 0.2, 0], E3, 0.5)
    snap = reconstruct_deformation(InterfaceTrajectory.from_arrays([0.0, 1.0], [0.4, 0.5]), spec)[1]
    assert sign_convention(snap) == "c2-c1=a*u"
    snap.c1 = -snap.c1
    assert sign_convention(snap) == "c1-c2=a*u"


@settings(max_examples=30)
@given(st.integers(0, 2**31 - 1))
def test_deformation_continuous_and_lipschitz(seed):
    rng = np.random.default_rng(seed)
    spec, _ = random_compatible_spec(rng, shear_scale=3.0)
    for snap in reconstruct_deformation(smooth_trajectory(9), spec):
        assert snap.continuity_gap() <= 1e-12
        pts = rng.uniform(-1, 2, size=(50, 3))
        ys = snap(pts)
        d_x = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
        d_y = np.linalg.norm(ys[:, None] - ys[None], axis=-1)
        off = d_x > 0
        assert np.all(d_y[off] <= snap.lipschitz_bound() * d_x[off] * (1 + 1e-12))


def test_entropy_barycenter_two_valued():
    g = Grid1D(10)
    field = entropy_barycenter(g, 0.34, alpha=2.0, theta_T=4.0)
    assert set(np.unique(field)) == {-2.0, 0.0}
    assert np.all(field[:3] == -2.0) and np.all(field[3:] == 0.0)
    assert np.all(entropy_barycenter(g, 0.34, 2.0, 4.0, normalized=False)[:3] == -0.5)


def test_entropy_identity_trivial_cases():
    g = Grid1D(64)
    traj = smooth_trajectory()
    assert np.all(entropy_source_identity(traj, np.zeros(g.n_nodes), g) == 0)
    fixed = InterfaceTrajectory.from_arrays(np.linspace(0, 1, 5), np.full(5, 0.4), v=np.zeros(5))
    assert np.all(entropy_source_identity(fixed, lambda s: np.sin(np.pi * s), g) == 0)


def test_entropy_identity_first_order():
    g = Grid1D(4096)

    def worst(m):
        t = np.linspace(0, 1, m + 1)
        traj = InterfaceTrajectory.from_arrays(t, 0.3 + 0.1 * t, v=np.full(m + 1, 0.1))
        return np.max(np.abs(entropy_source_identity(traj, lambda s: np.sin(np.pi * s), g)))

    assert worst(100) / worst(200) == pytest.approx(2.0, rel=0.05)


def test_mm_audit_pass_and_violations():
    spec = LaminateSpec.from_shear([0.2, 0, 0], E3, 0.4)
    traj = smooth_trajectory()
    assert moving_mask_audit(traj, spec).all_pass
    jumped = InterfaceTrajectory.from_arrays(traj.t, np.array(traj.u) + np.where(np.arange(65) >= 30, 0.2, 0.0), v=np.full(65, 0.1))
    report = moving_mask_audit(jumped, spec, v_max=0.1)
    assert not report.mm3 and report.mm1 and report.mm2
    drifting = [spec] * 10 + [LaminateSpec.from_shear([0.2, 0, 0], E3, 0.5)]
    assert not moving_mask_audit(traj, spec, spec_history=drifting).mm4
