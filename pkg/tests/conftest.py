from functools import lru_cache

import numpy as np
import pytest

from ltrb import assemble_operators, build_structured_mesh, gaussian_field, l2_project


@lru_cache(maxsize=None)
def mesh_and_ops(n: int, c: float = 1.0):
    mesh = build_structured_mesh(n)
    return mesh, assemble_operators(mesh, c)


@lru_cache(maxsize=None)
def gaussian_ic(n: int):
    mesh, ops = mesh_and_ops(n)
    u0 = l2_project(ops, mesh, gaussian_field((0.25, -0.1), 0.05))
    u0.setflags(write=False)
    return u0


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def generalized_eigh(ops):
    """Dense oracle for the (stiffness, mass) pencil."""
    import scipy.linalg as la

    return la.eigh(ops.stiffness.toarray(), ops.mass.toarray())


# -- acceptance summary -------------------------------------------------------

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        _ACCEPTANCE[props["criterion"]] = (status, props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        status, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}  {status}  {detail}")
