import numpy as np
import pytest

from pairqc.ansatz import AnsatzParams, prepare_bcs
from pairqc.pairing import PairingSpec
from pairqc.projection import projector_oracle
from pairqc.vqe import OptimizationConfig, minimize


@pytest.fixture(scope="session")
def spec():
    return PairingSpec()


@pytest.fixture(scope="session")
def converged(spec):
    """Converged BCS, QPAV and QVAP optimizer results at the reference point."""
    return {m: minimize(spec, OptimizationConfig(mode=m)) for m in ("BCS", "QPAV", "QVAP")}


@pytest.fixture(scope="session")
def projected(spec, converged):
    def make(mode):
        sb = prepare_bcs(AnsatzParams(tuple(converged[mode].thetas)))
        return projector_oracle(sb, spec.target_pairs)

    return {"QPAV": make("QPAV"), "QVAP": make("QVAP")}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_hermitian(n, rng):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (a + a.conj().T)


def random_state_amplitudes(n_qubits, rng):
    v = rng.standard_normal(1 << n_qubits) + 1j * rng.standard_normal(1 << n_qubits)
    return v / np.linalg.norm(v)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line, then assert it."""

    def check(number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
