import pytest

from esbound.reduction import normalize_triple, reduce_at_p, synthetic_instances

CORPUS_SIZE = 300
CORPUS_SEED = 20240611

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def corpus():
    """Synthetic reduction corpus: (instance, triple, case, normalized triple)."""
    out = []
    for inst in synthetic_instances(CORPUS_SIZE, seed=CORPUS_SEED):
        triple, case = reduce_at_p(inst.n, inst.d, inst.k, inst.ell, inst.p)
        out.append((inst, triple, case, normalize_triple(triple)))
    return out


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def record(number, ok, detail=""):
        _ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
