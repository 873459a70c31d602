"""Quasi-static electrical solution of one implication step.

The step drives the conditioning device P's far terminal at v_p, grounds
the target device Q's far terminal, and attaches the load to the wire the
two devices share. Every other device has a floating far terminal, carries
no current, and equalizes to the common node, so the balance involves only
P, Q, and the load.

Sign convention: the reported common-node voltage ``v_c`` is the negated
electrical node potential, chosen so that for ohmic devices

    v_c = (-g_p * v_p - g_l * v_l) / (g_l + g_p + g_q)

and so that a positive ``v_c`` is a set-directed drop across a grounded
device whose set terminal faces away from the common node. Signed device
drops are reported in each device's own set convention: a drop at or above
the device's set threshold switches it ON, a drop at or below its reset
thresholds switches it (partially or fully) OFF.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import device as dev
from .device import DeviceState, Logic, MemristorSpec, ThresholdSample
from .topology import CurrentSourceLoad, ImpConfig, ResistiveLoad, StackTopology

__all__ = [
    "NodeSolution",
    "NoConvergence",
    "SwitchEvent",
    "EventKind",
    "solve_pair",
    "solve_node",
    "settle_states",
    "TOL_CURRENT",
]

TOL_CURRENT = 1e-12
TOL_STEP = 1e-12
MAX_ITERATIONS = 100
BRACKET = 10.0


class NoConvergence(Exception):
    """The current balance could not be driven below tolerance."""


@dataclass(frozen=True)
class NodeSolution:
    """Common-node voltage and signed set-convention drops across the two
    driven devices."""

    v_c: float
    drop_p: float
    drop_q: float
    residual: float
    iterations: int


class EventKind(Enum):
    SET = "set"
    PARTIAL_RESET = "partial_reset"
    FULL_RESET = "full_reset"


@dataclass(frozen=True)
class SwitchEvent:
    cell: str
    kind: EventKind
    drop: float
    iteration: int


def _balance(x: float, p_spec: MemristorSpec, p_state: DeviceState, v_p: float,
             q_spec: MemristorSpec, q_state: DeviceState,
             load: ResistiveLoad | CurrentSourceLoad) -> tuple[float, float]:
    """Signed current sum and its derivative at node coordinate x (= v_c)."""
    f = dev.current(p_spec, p_state, v_p + x) + dev.current(q_spec, q_state, x)
    df = (dev.differential_conductance(p_spec, p_state, v_p + x)
          + dev.differential_conductance(q_spec, q_state, x))
    if isinstance(load, ResistiveLoad):
        f += load.g_l * (load.v_l + x)
        df += load.g_l
    else:
        f += load.i_l
    return f, df


def _solve_linear(p_spec: MemristorSpec, p_state: DeviceState, v_p: float,
                  q_spec: MemristorSpec, q_state: DeviceState,
                  load: ResistiveLoad | CurrentSourceLoad) -> float:
    g_p = (p_spec.g_on if p_state.logic is Logic.ON else p_spec.g_off) * p_state.conductance_scale
    g_q = (q_spec.g_on if q_state.logic is Logic.ON else q_spec.g_off) * q_state.conductance_scale
    if isinstance(load, ResistiveLoad):
        return (-g_p * v_p - load.g_l * load.v_l) / (load.g_l + g_p + g_q)
    return (-g_p * v_p - load.i_l) / (g_p + g_q)


def _solve_iterative(p_spec: MemristorSpec, p_state: DeviceState, v_p: float,
                     q_spec: MemristorSpec, q_state: DeviceState,
                     load: ResistiveLoad | CurrentSourceLoad) -> tuple[float, float, int]:
    """Safeguarded Newton on the monotone current balance.

    The balance is strictly increasing in x, so a sign change on the
    bracket guarantees a unique root; Newton steps that leave the current
    bracket fall back to bisection.
    """
    lo, hi = -BRACKET, BRACKET
    f_lo, _ = _balance(lo, p_spec, p_state, v_p, q_spec, q_state, load)
    f_hi, _ = _balance(hi, p_spec, p_state, v_p, q_spec, q_state, load)
    if f_lo > 0.0 or f_hi < 0.0:
        raise NoConvergence(
            f"no current-balance root in [{-BRACKET}, {BRACKET}] V "
            f"(f({-BRACKET})={f_lo:.3g}, f({BRACKET})={f_hi:.3g})")
    x = 0.0
    step = float("inf")
    for it in range(1, MAX_ITERATIONS + 1):
        f, df = _balance(x, p_spec, p_state, v_p, q_spec, q_state, load)
        # converge in both current and position: the residual tolerance
        # alone leaves x loose where the local conductance is small
        if abs(f) <= TOL_CURRENT and abs(step) <= TOL_STEP:
            return x, f, it
        if f > 0.0:
            hi = x
        else:
            lo = x
        if df > 0.0:
            x_new = x - f / df
            if not lo < x_new < hi:
                x_new = 0.5 * (lo + hi)
        else:
            x_new = 0.5 * (lo + hi)
        step = x_new - x
        x = x_new
    f, _ = _balance(x, p_spec, p_state, v_p, q_spec, q_state, load)
    if abs(f) <= TOL_CURRENT:
        return x, f, MAX_ITERATIONS
    raise NoConvergence(f"residual {f:.3g} A after {MAX_ITERATIONS} iterations")


def solve_pair(p_spec: MemristorSpec, p_state: DeviceState,
               q_spec: MemristorSpec, q_state: DeviceState,
               config: ImpConfig, s_p: int = 1, s_q: int = 1,
               method: str = "auto") -> NodeSolution:
    """Solve the two-device balance with explicit specs and drop signs.

    ``method`` is "auto" (closed form when every involved branch is ohmic,
    Newton otherwise), "closed", or "iterative".
    """
    all_linear = isinstance(p_spec.iv_model, dev.LinearIV) and isinstance(
        q_spec.iv_model, dev.LinearIV)
    if method == "closed" or (method == "auto" and all_linear):
        if not all_linear:
            raise ValueError("closed-form solve requires ohmic devices")
        x = _solve_linear(p_spec, p_state, config.v_p, q_spec, q_state, config.load)
        residual, _ = _balance(x, p_spec, p_state, config.v_p, q_spec, q_state,
                               config.load)
        iterations = 0
    elif method in ("auto", "iterative"):
        x, residual, iterations = _solve_iterative(
            p_spec, p_state, config.v_p, q_spec, q_state, config.load)
    else:
        raise ValueError(f"unknown method {method!r}")

    return NodeSolution(
        v_c=x,
        drop_p=s_p * (config.v_p + x),
        drop_q=s_q * x,
        residual=residual,
        iterations=iterations,
    )


def solve_node(topology: StackTopology, specs: dict[str, MemristorSpec],
               states: dict[str, DeviceState], config: ImpConfig,
               p: str, q: str, method: str = "auto") -> NodeSolution:
    """Solve the common node of an implication step between cells p and q.

    ``states`` may contain spectator cells; only p and q enter the balance.
    """
    common = topology.common_wire(p, q)
    p_cell, q_cell = topology.cells[p], topology.cells[q]
    return solve_pair(specs[p_cell.spec_ref], states[p],
                      specs[q_cell.spec_ref], states[q], config,
                      s_p=topology.step_sign(p, common),
                      s_q=topology.step_sign(q, common), method=method)


def settle_states(topology: StackTopology, specs: dict[str, MemristorSpec],
                  states: dict[str, DeviceState], config: ImpConfig,
                  p: str, q: str, thresholds: dict[str, ThresholdSample],
                  partial_reset_factor: float = dev.PARTIAL_RESET_FACTOR,
                  ) -> tuple[dict[str, DeviceState], list[SwitchEvent]]:
    """Apply the switching rules of one pulse to a fixed point.

    Each pass solves the node and then applies at most one event per rule:
    the target Q sets if its drop reaches its sampled set threshold; either
    driven device resets (partially for drops between the full level and
    the onset, fully below the full level). The state lattice is monotone
    within a pulse, so the loop terminates in a handful of passes.
    """
    states = dict(states)
    events: list[SwitchEvent] = []
    set_done = False
    partial_done = {p: False, q: False}
    full_done = {p: False, q: False}

    for iteration in range(1, 9):
        sol = solve_node(topology, specs, states, config, p, q)
        fired: list[SwitchEvent] = []

        if (not set_done and states[q].logic is Logic.OFF
                and sol.drop_q >= thresholds[q].v_set):
            states[q] = DeviceState(Logic.ON, 1.0)
            fired.append(SwitchEvent(q, EventKind.SET, sol.drop_q, iteration))
            set_done = True

        for cell, drop in ((p, sol.drop_p), (q, sol.drop_q)):
            th = thresholds[cell]
            st = states[cell]
            if drop <= th.v_reset_full and not full_done[cell]:
                if st.logic is Logic.ON or st.conductance_scale != 1.0:
                    states[cell] = DeviceState(Logic.OFF, 1.0)
                    fired.append(SwitchEvent(cell, EventKind.FULL_RESET, drop, iteration))
                full_done[cell] = True
            elif drop <= th.v_reset_onset and not partial_done[cell]:
                if st.logic is Logic.ON:
                    states[cell] = DeviceState(
                        Logic.ON, st.conductance_scale * partial_reset_factor)
                    fired.append(SwitchEvent(cell, EventKind.PARTIAL_RESET, drop, iteration))
                partial_done[cell] = True

        if not fired:
            return states, events
        events.extend(fired)

    raise NoConvergence("switching did not reach a fixed point")
