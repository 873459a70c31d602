"""Symbolic derivation of every closed form from the binding boundary
conditions, as an oracle fully independent of the numeric code paths.

The three binding conditions at margin d: the target's drop just reaches
its maximum set threshold when both devices start OFF, just stays below
the minimum set threshold when the conditioning device is ON, and the
conditioning device's own drop just respects its bound (set side for the
parallel orientation, reset side for the anti-parallel one).
"""

import sympy as sp

import implogic as il
from implogic.topology import Polarity

g_on, g_off, g_l = sp.symbols("g_on g_off g_l", positive=True)
v_p, v_l, i_l, d = sp.symbols("v_p v_l i_l d", real=True)
v_s = sp.symbols("v_s", positive=True)


def test_identical_device_closed_forms():
    ll = g_l * v_l
    system = [
        sp.Eq((-v_p * g_off - ll) / (2 * g_off + g_l), v_s + d),
        sp.Eq((-v_p * g_on - ll) / (g_off + g_on + g_l), v_s - d),
        sp.Eq((v_p * (g_off + g_l) - ll) / (2 * g_off + g_l), v_s - d),
    ]
    sol = sp.solve(system, [v_p, v_l, d], dict=True)
    assert len(sol) == 1
    s = sol[0]

    delta = v_s * (g_on - g_off) / (2 * g_l + 3 * g_on + g_off)
    assert sp.simplify(s[d] - delta) == 0
    assert sp.simplify(s[v_p] + 2 * delta) == 0
    v_l_form = (-2 * v_s * (g_l ** 2 + 2 * g_l * (g_on + g_off)
                            + g_off * (3 * g_on + g_off))
                / (g_l * (2 * g_l + 3 * g_on + g_off)))
    assert sp.simplify(s[v_l] - v_l_form) == 0

    # the current-source limit: g_l * v_l -> -2 v* g_off as g_l -> 0
    limit_ll = sp.limit(g_l * s[v_l], g_l, 0)
    assert sp.simplify(limit_ll + 2 * v_s * g_off) == 0
    # and the large-ratio margin ceiling v*/3
    assert sp.limit(delta.subs({g_l: 0, g_on: sp.Symbol("r") * g_off}),
                    sp.Symbol("r"), sp.oo) == v_s / 3


def test_symbolic_forms_match_implementation():
    subs = {g_l: sp.Rational(33, 1_000_000), g_on: sp.Rational(115, 1_000_000),
            g_off: sp.Rational(10, 1_000_000), v_s: sp.Rational(3, 2)}
    delta = v_s * (g_on - g_off) / (2 * g_l + 3 * g_on + g_off)
    got = il.delta_ideal_parallel(33e-6, 115e-6, 10e-6, 1.5)
    assert abs(got - float(delta.subs(subs))) < 1e-15
    vp_num, vl_num = il.optimal_bias(33e-6, 115e-6, 10e-6, 1.5)
    v_l_form = (-2 * v_s * (g_l ** 2 + 2 * g_l * (g_on + g_off)
                            + g_off * (3 * g_on + g_off))
                / (g_l * (2 * g_l + 3 * g_on + g_off)))
    assert abs(vp_num + 2 * float(delta.subs(subs))) < 1e-15
    assert abs(vl_num - float(v_l_form.subs(subs))) < 1e-12


def test_general_margins_from_boundary_conditions():
    vq_min, vq_max, vp_min, vpr_min = sp.symbols(
        "vq_min vq_max vp_min vpr_min", real=True)
    base = [
        sp.Eq((-v_p * g_off - i_l) / (2 * g_off), vq_max + d),
        sp.Eq((-v_p * g_on - i_l) / (g_off + g_on), vq_min - d),
    ]
    # parallel: the conditioning device meets its set bound from below
    par = sp.solve(base + [
        sp.Eq((v_p * g_off - i_l) / (2 * g_off), vp_min - d)],
        [v_p, i_l, d], dict=True)[0]
    # anti-parallel: its mirrored drop meets the reset onset from above
    anti = sp.solve(base + [
        sp.Eq((v_p * g_off - i_l) / (2 * g_off), -(vpr_min + d))],
        [v_p, i_l, d], dict=True)[0]

    par_form = ((g_on + g_off) * (vq_min - vq_max)
                + (g_on - g_off) * vp_min) / (3 * g_on + g_off)
    anti_form = ((g_on + g_off) * (vq_min - vq_max)
                 - (g_on - g_off) * vpr_min) / (3 * g_on + g_off)
    assert sp.simplify(par[d] - par_form) == 0
    assert sp.simplify(anti[d] - anti_form) == 0

    # and the implementation evaluates exactly these forms
    p_spec = il.bottom_device_spec()
    q_spec = il.top_device_spec()
    subs = {g_on: sp.Rational(115, 1_000_000), g_off: sp.Rational(10, 1_000_000),
            vq_min: sp.Rational(7, 10), vq_max: sp.Rational(16, 10),
            vp_min: sp.Rational(11, 10), vpr_min: -sp.Rational(15, 10)}
    got_par = il.delta_general(p_spec, q_spec, Polarity.PARALLEL, 115e-6, 10e-6)
    got_anti = il.delta_general(p_spec, q_spec, Polarity.ANTI_PARALLEL,
                                115e-6, 10e-6)
    assert abs(got_par - float(par_form.subs(subs))) < 1e-15
    assert abs(got_anti - float(anti_form.subs(subs))) < 1e-15
