import numpy as np
import pytest

from labeltnc import EvalPair, LabeledDataset

ACCEPTANCE_LINES: list[str] = []


def random_dataset(rng, n=None, dim=None, k=None, spread=None):
    n = int(rng.integers(12, 120)) if n is None else n
    dim = int(rng.integers(2, 12)) if dim is None else dim
    k = int(rng.integers(2, 6)) if k is None else k
    spread = float(rng.uniform(0.0, 4.0)) if spread is None else spread
    labels = np.r_[np.arange(k), rng.integers(0, k, n - k)]
    rng.shuffle(labels)
    centers = rng.normal(scale=spread, size=(k, dim))
    return LabeledDataset(centers[labels] + rng.normal(size=(n, dim)), labels)


def random_pair(rng, n=None, dim=None, k=None, emb_dim=2):
    x = random_dataset(rng, n, dim, k)
    # a noisy linear projection: related to X but with its own distortions
    proj = rng.normal(size=(x.dim, emb_dim))
    z = x.points @ proj + rng.normal(scale=float(rng.uniform(0.1, 3.0)), size=(x.n, emb_dim))
    return EvalPair(x, x.with_points(z))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def record_criterion():
    def record(number, name, passed, detail=""):
        ACCEPTANCE_LINES.append(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {name}  {detail}".rstrip())

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
