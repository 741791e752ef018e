import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from frubias import FuzzyConfig, level1, load_german, load_table  # noqa: E402

TOY_CSV = b"f1,f2,class\n0,0,c0\n0,1,c0\n1,0,c1\n1,1,c1\n"


@pytest.fixture
def toy():
    return load_table(TOY_CSV)


@pytest.fixture
def toy_csv(tmp_path):
    path = tmp_path / "toy.csv"
    path.write_bytes(TOY_CSV)
    return path


@pytest.fixture(scope="session")
def german():
    return load_german()


@pytest.fixture(scope="session")
def german_path():
    from importlib import resources
    return Path(str(resources.files("frubias").joinpath("data/german.data")))


@pytest.fixture(scope="session")
def german_level1(german):
    return level1(german, FuzzyConfig())


def random_table_bytes(rng, n, n_numeric, n_nominal, n_classes):
    """CSV bytes of a random mixed-type table with every class present."""
    header = [f"x{i}" for i in range(n_numeric)] + [f"c{i}" for i in range(n_nominal)] + ["label"]
    lines = [",".join(header)]
    labels = np.concatenate([np.arange(n_classes), rng.integers(0, n_classes, n - n_classes)])
    rng.shuffle(labels)
    for r in range(n):
        cells = [f"{rng.integers(0, 20) / 4:.2f}" for _ in range(n_numeric)]
        cells += [f"v{rng.integers(0, 3)}" for _ in range(n_nominal)]
        cells.append(f"k{labels[r]}")
        lines.append(",".join(cells))
    return ("\n".join(lines) + "\n").encode()


def as_rows(table):
    kinds = [f.kind.value for f in table.schema]
    rows = [list(map(float, r)) for r in table.values]
    return rows, kinds, [int(v) for v in table.labels]


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(capsys):
    """Record one acceptance line; the line is also echoed in the terminal summary."""
    def record(label, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
