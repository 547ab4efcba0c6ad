"""Python bindings for the ssc trajectory planner."""

import json
from pathlib import Path

from . import _core
from ._core import (
    SscError,
    bernstein,
    eval_normalized,
    exit_code,
    hodograph,
    jerk_hessian,
    solve_qp,
    to_cartesian,
    to_frenet,
)

__all__ = [
    "SscError",
    "bernstein",
    "eval_normalized",
    "exit_code",
    "hodograph",
    "jerk_hessian",
    "plan",
    "plan_file",
    "replan",
    "solve_qp",
    "to_cartesian",
    "to_frenet",
]


def _text(scenario):
    return scenario if isinstance(scenario, str) else json.dumps(scenario)


def plan(scenario, out_dir=None, dump_corridor=False):
    """Plan a scenario given as a dict or JSON text.

    Returns a dict with "report", "corridor" and, on success, "trajectory".
    """
    doc = _core.plan(_text(scenario), str(out_dir) if out_dir else "", dump_corridor)
    return json.loads(doc)


def plan_file(path, out_dir=None, dump_corridor=False):
    return plan(Path(path).read_text(), out_dir, dump_corridor)


def replan(scenario, t, s, l, s_dot=0.0, l_dot=0.0, s_ddot=0.0, l_ddot=0.0):
    """Plan the same scenario from another Frenet state."""
    doc = _core.replan(_text(scenario), t, s, l, s_dot, l_dot, s_ddot, l_ddot)
    return json.loads(doc)
