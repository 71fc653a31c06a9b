import math

import numpy as np
import pytest

from mubflow import dynamics as dy
from mubflow import inertia as io
from mubflow import spectral as sp

TWO_PI = 2.0 * np.pi
L = io.MU_MINUS_DXX


def rand_field(n=256, modes=32, seed=0, mean=None):
    return sp.random_trig_field(n, modes, np.random.default_rng(seed), mean_value=mean)


# bracket ---------------------------------------------------------------------

def test_bracket_antisymmetry():
    u = rand_field(seed=1)
    assert np.max(np.abs(dy.lie_bracket(u, u))) < 1e-11


def test_bracket_with_constant():
    v = rand_field(seed=2)
    out = dy.lie_bracket(np.full(v.size, 1.0), v)
    assert np.max(np.abs(out - sp.derivative(v, 1))) < 1e-11


def test_bracket_sin_cos_symbolic_oracle():
    import sympy
    xs = sympy.symbols("x")
    u_s = sympy.sin(2 * sympy.pi * xs)
    v_s = sympy.cos(2 * sympy.pi * xs)
    bracket_s = sympy.simplify(u_s * sympy.diff(v_s, xs) - sympy.diff(u_s, xs) * v_s)
    assert bracket_s == -2 * sympy.pi

    n = 64
    x = sp.grid(n)
    out = dy.lie_bracket(np.sin(TWO_PI * x), np.cos(TWO_PI * x))
    assert np.max(np.abs(out - float(bracket_s))) < 1e-12


# the symmetric bilinear term ---------------------------------------------------

def test_christoffel_identity_operator_is_burgers():
    # B(u, u) = 3 u u_x when A is the identity
    import sympy
    xs = sympy.symbols("x")
    u_s = sympy.sin(2 * sympy.pi * xs)
    expected_s = sympy.expand_trig(sympy.simplify(3 * u_s * sympy.diff(u_s, xs)))

    n = 64
    x = sp.grid(n)
    u = np.sin(TWO_PI * x)
    out = dy.christoffel(io.IDENTITY, u, u)
    lam = sympy.lambdify(xs, expected_s, "numpy")
    assert np.max(np.abs(out - lam(x))) < 1e-12
    # amplitude check: 3 u u_x = 3 pi sin(4 pi x)
    assert np.max(np.abs(out - 3.0 * np.pi * np.sin(2.0 * TWO_PI * x))) < 1e-12


def test_christoffel_neg_dxx_matches_gradient_form():
    # B(u, u) = -A^{-1}(2 u_x u_xx + u u_xxx) for A = -d_xx on mean-zero data
    u = rand_field(seed=3, mean=0.0)
    lhs = dy.christoffel(io.NEG_DXX, u, u)
    ux = sp.derivative(u, 1)
    uxx = sp.derivative(u, 2)
    uxxx = sp.derivative(u, 3)
    rhs = -io.invert(io.NEG_DXX, 2.0 * sp.product(ux, uxx) + sp.product(u, uxxx))
    assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_christoffel_symmetric():
    u = rand_field(seed=4)
    v = rand_field(seed=5)
    for spec in [L, io.InertiaSpec.helmholtz(0.5)]:
        assert np.max(np.abs(dy.christoffel(spec, u, v) - dy.christoffel(spec, v, u))) < 1e-11


def test_covariant_derivative_reduces_on_diagonal():
    u = rand_field(seed=6)
    assert np.max(np.abs(dy.covariant_derivative(L, u, u) - dy.christoffel(L, u, u))) < 1e-11


def test_covariant_derivative_along_constant():
    v = rand_field(seed=7)
    one = np.ones(v.size)
    expected = 0.5 * sp.derivative(v, 1) + dy.christoffel(L, one, v)
    assert np.max(np.abs(dy.covariant_derivative(L, one, v) - expected)) < 1e-11


def test_torsion_free():
    u = rand_field(seed=8)
    v = rand_field(seed=9)
    lhs = dy.covariant_derivative(L, u, v) - dy.covariant_derivative(L, v, u)
    assert np.max(np.abs(lhs - dy.lie_bracket(u, v))) <= 1e-10


# right-hand sides ----------------------------------------------------------------

def test_constants_are_stationary():
    one = np.ones(64)
    for spec in [L, io.IDENTITY, io.InertiaSpec.helmholtz(1.0)]:
        assert np.max(np.abs(dy.euler_rhs(spec, one))) < 1e-13
    for b in (0.0, 2.0, 3.0):
        assert np.max(np.abs(dy.mub_rhs(b, one))) < 1e-13


def test_euler_rhs_single_mode_oracle():
    # independent mode arithmetic: u = cos(n x), n = 2 pi, A u = n^2 u,
    # 2 (Au) u_x + u (Au)_x = -(3/2) n^3 sin(2 n x), invert at mode 2 divides
    # by (2n)^2, so u_t = (3 n / 8) sin(2 n x) = (3 pi / 4) sin(4 pi x)
    n_w = TWO_PI
    amplitude = 1.5 * n_w ** 3 / (2.0 * n_w) ** 2
    assert amplitude == pytest.approx(3.0 * np.pi / 4.0, rel=1e-15)

    n = 256
    x = sp.grid(n)
    out = dy.euler_rhs(L, np.cos(TWO_PI * x))
    assert np.max(np.abs(out - amplitude * np.sin(2.0 * TWO_PI * x))) < 1e-12


def test_euler_rhs_identity_is_negative_burgers():
    n = 256
    x = sp.grid(n)
    out = dy.euler_rhs(io.IDENTITY, np.sin(TWO_PI * x))
    assert np.max(np.abs(out + 3.0 * np.pi * np.sin(2.0 * TWO_PI * x))) < 1e-12


def test_mub_matches_euler_at_b2():
    for seed in range(5):
        u = rand_field(seed=seed)
        d = np.max(np.abs(dy.euler_rhs(L, u) - dy.mub_rhs(2.0, u)))
        assert d / np.max(np.abs(u)) <= 1e-9


def test_mub_b3_single_mode_gap():
    # both sides on u = cos(2 pi x): the difference is L^{-1}((Lu) u_x),
    # a sine at mode 2 with amplitude (2 pi)^3 / (2 (4 pi)^2) = pi / 4
    gap_amp = TWO_PI ** 3 / (2.0 * (2.0 * TWO_PI) ** 2)
    assert gap_amp == pytest.approx(np.pi / 4.0, rel=1e-15)

    n = 256
    x = sp.grid(n)
    u = np.cos(TWO_PI * x)
    diff = dy.euler_rhs(L, u) - dy.mub_rhs(3.0, u)
    assert np.max(np.abs(diff + gap_amp * np.sin(2.0 * TWO_PI * x))) < 1e-12


def test_mub_mean_momentum_identity():
    # by-parts oracle: int (mu(u) - u_xx) u_x dx = 0, hence mu(m) is constant
    rng = np.random.default_rng(10)
    for _ in range(10):
        u = sp.random_trig_field(128, 30, rng)
        m = io.apply(L, u)
        assert abs(sp.inner_l2(m, sp.derivative(u, 1))) < 1e-12


# time stepping -------------------------------------------------------------------

def test_rk4_zero_rhs_is_identity():
    u = rand_field(seed=11)
    out = dy.step_rk4(lambda w: np.zeros_like(w), u, 0.37)
    assert np.array_equal(out, u)


def test_rk4_advection_convergence_order():
    # u_t = -u_x has the exact solution u0(x - t)
    n = 64
    u0 = sp.trig_field(n, 0.0, [0.4, 0.1], [0.2])
    rhs = lambda w: -sp.derivative(w, 1)
    t_end = 0.5

    def error(dt):
        u = u0.copy()
        for _ in range(int(round(t_end / dt))):
            u = dy.step_rk4(rhs, u, dt)
        exact = sp.evaluate(u0, sp.grid(n) - t_end)
        return np.max(np.abs(u - exact))

    e1, e2 = error(2e-2), error(1e-2)
    order = math.log2(e1 / e2)
    assert order >= 3.8


def test_short_run_conserves_energy_and_mean():
    cfg = dy.SimulationConfig(t_end=0.1)
    res = dy.simulate(cfg)
    assert res.status == dy.STATUS_COMPLETED
    e = np.array([r.energy_mu for r in res.rows])
    mu = np.array([r.mu_u for r in res.rows])
    assert np.max(np.abs(e - e[0])) / abs(e[0]) <= 1e-6
    assert np.max(np.abs(mu - mu[0])) <= 1e-10


def test_energy_conserved_for_any_symmetric_operator():
    # d/dt <Au, u> = -2 <T, u> = 0 since T u integrates to a total derivative
    spec = io.InertiaSpec.diagonal({k: 1.0 + 0.3 * k ** 2 for k in range(0, 33)})
    cfg = dy.SimulationConfig(n=64, t_end=0.1, inertia=spec,
                              initial={"type": "trig", "cos": [0.2], "sin": [0.1]})
    res = dy.simulate(cfg)
    e = np.array([r.energy_A for r in res.rows])
    assert np.max(np.abs(e - e[0])) / abs(e[0]) <= 1e-6


def test_blowup_flag_on_threshold():
    cfg = dy.SimulationConfig(t_end=0.1, blowup_threshold=0.25)
    res = dy.simulate(cfg)
    assert res.status == dy.STATUS_BLOWUP
    assert all(np.isfinite(r.linf_u) for r in res.rows)


def test_validate_config_names_field():
    with pytest.raises(ValueError, match="dt"):
        dy.validate_config(dy.SimulationConfig(dt=-1.0))
    with pytest.raises(ValueError, match="output_every"):
        dy.validate_config(dy.SimulationConfig(output_every=0))
    with pytest.raises(ValueError, match="initial"):
        dy.validate_config(dy.SimulationConfig(
            inertia=io.NEG_DXX, initial={"type": "preset", "name": "mucauchy"}))
    with pytest.raises(ValueError, match="form"):
        dy.validate_config(dy.SimulationConfig(form="implicit"))
    # dealiased runs need initial data within n/3
    with pytest.raises(ValueError, match="n/3"):
        dy.validate_config(dy.SimulationConfig(
            n=24, initial={"type": "trig", "cos": [0.0] * 8 + [0.1]}))


def test_momentum_state_consistency():
    u = rand_field(seed=12)
    state = dy.SimulationState(t=0.0, u=u, m=io.apply(L, u))
    assert state.momentum_defect(L) <= 1e-10


# flow maps -----------------------------------------------------------------------

def test_flow_of_zero_velocity_is_identity():
    n = 32
    series = np.zeros((5, n))
    flow = dy.reconstruct_flow(series, 0.01)
    for frame in flow.g:
        assert np.array_equal(frame, sp.grid(n))
    assert np.allclose(flow.gx, 1.0)


def test_flow_of_constant_velocity_is_rotation():
    n = 32
    c = 0.3
    series = np.full((9, n), c)
    flow = dy.reconstruct_flow(series, 0.01)
    expected = sp.grid(n)[None, :] + c * flow.times[:, None]
    assert np.max(np.abs(flow.g - expected)) < 1e-14
    assert np.min(flow.gx) > 0.0


def test_flow_requires_even_interval_count():
    with pytest.raises(ValueError, match="even number"):
        dy.reconstruct_flow(np.zeros((4, 16)), 0.01)


def test_flow_self_consistency_short_run():
    cfg = dy.SimulationConfig(t_end=0.1)
    res = dy.simulate(cfg)
    flow = dy.reconstruct_flow(res.u_history, cfg.dt)
    defect = dy.flow_defect(flow, res.u_history[::2])
    assert np.max(defect) <= 1e-6
    assert np.min(flow.min_gx()) > 0.0


def test_tracked_flow_matches_reconstruction():
    cfg = dy.SimulationConfig(t_end=0.1, track_flow=True)
    res = dy.simulate(cfg)
    flow = dy.reconstruct_flow(res.u_history, cfg.dt)
    inline = res.flow_history[::2]
    assert np.max(np.abs(inline - flow.g)) <= 1e-8


def test_tracked_flow_winding_number_one():
    cfg = dy.SimulationConfig(t_end=0.05, track_flow=True)
    res = dy.simulate(cfg)
    g_end = res.flow_history[-1]
    wrapped = g_end - sp.grid(cfg.n)
    # g - id periodic and small: particle labels advance exactly once per lap
    assert np.max(np.abs(wrapped)) < 0.5


# diagnostics -----------------------------------------------------------------------

def test_diagnostics_constant_state():
    row = dy.diagnostics(L, np.ones(64), 0.0)
    assert row.energy_mu == pytest.approx(1.0, abs=1e-13)
    assert row.mu_u == pytest.approx(1.0, abs=1e-14)
    assert row.mu_m == pytest.approx(1.0, abs=1e-14)


def test_diagnostics_sine_energy():
    u = np.sin(TWO_PI * sp.grid(256))
    row = dy.diagnostics(L, u, 0.0)
    assert row.energy_mu == pytest.approx(2.0 * np.pi ** 2, rel=1e-12)
    assert math.isnan(row.min_gx)
