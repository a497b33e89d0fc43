import numpy as np
import pytest

from fourierhedge import (NIG, ComplexMeasure, OperatorContext, Poisson, TimeChangedBrownian,
                          VarianceGamma)


_VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture
def verdict():
    """Record and print a one-line pass/fail result for an acceptance criterion."""
    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        _VERDICTS.append(line)
        return ok
    return record


@pytest.fixture
def cos_pair():
    return ComplexMeasure.from_atoms([(1.0, 0.5), (-1.0, 0.5)])


@pytest.fixture
def poisson():
    return Poisson(1.0)


@pytest.fixture
def vg():
    return VarianceGamma(2.0, 1.0, 1.0, 0.0)


@pytest.fixture
def nig():
    return NIG(2.0, 1.0, 1.0, 0.0)


@pytest.fixture
def gaussian():
    return TimeChangedBrownian.from_functions(lambda t: 0.1 * t, lambda t: t, [0.0, 1.0])


@pytest.fixture
def brownian():
    return TimeChangedBrownian.from_functions(lambda t: 0.0 * t, lambda t: t, [0.0, 1.0])


@pytest.fixture
def ctx_of():
    return lambda model, T=1.0: OperatorContext(model, T)


@pytest.fixture
def xs():
    return np.linspace(-3.0, 3.0, 13)
