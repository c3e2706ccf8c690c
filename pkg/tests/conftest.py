import pytest

from cvskit.datamodel import CertaintyValidityMatrix
from cvskit.fixtures import load_fixture

# Reference 10-epoch IMDB (strong sentiment) run at threshold 0.7.
# (epoch, train %, test %, CC, CI, UC, UI)
IMDB_COUNTS = [
    (1, 74.86, 82.11, 13462, 1507, 3007, 2082),
    (2, 89.48, 82.70, 14748, 2029, 1840, 1441),
    (3, 92.59, 68.29, 12585, 5177, 1113, 1183),
    (4, 94.42, 85.39, 16012, 2077, 1115, 854),
    (5, 95.80, 87.03, 16576, 1932, 881, 669),
    (6, 96.89, 86.00, 16568, 2253, 681, 556),
    (7, 97.38, 63.46, 12109, 6689, 619, 641),
    (8, 98.03, 85.09, 16496, 2513, 572, 477),
    (9, 98.70, 86.30, 16857, 2275, 453, 473),
    (10, 98.68, 85.55, 16751, 2527, 409, 371),
]
# (epoch, CommitAcc, AppropUncert, Coverage, CVS) as reported, rounded
IMDB_METRICS = [
    (1, 0.8993, 0.5801, 0.7463, 0.5217),
    (2, 0.8791, 0.4153, 0.8364, 0.3651),
    (3, 0.7085, 0.1860, 0.8855, 0.1318),
    (4, 0.8852, 0.2914, 0.9018, 0.2579),
    (5, 0.8956, 0.2572, 0.9227, 0.2304),
    (6, 0.8803, 0.1979, 0.9383, 0.1742),
    (7, 0.6442, 0.0874, 0.9372, 0.0563),
    (8, 0.8678, 0.1595, 0.9477, 0.1384),
    (9, 0.8811, 0.1721, 0.9538, 0.1517),
    (10, 0.8689, 0.1280, 0.9611, 0.1112),
]


def imdb_matrix(epoch):
    row = IMDB_COUNTS[epoch - 1]
    return CertaintyValidityMatrix(*row[3:])


@pytest.fixture
def epoch1_matrix():
    return imdb_matrix(1)


@pytest.fixture
def epoch9_matrix():
    return imdb_matrix(9)


@pytest.fixture
def imdb_filtered():
    return load_fixture("imdb_filtered")


@pytest.fixture
def imdb_full():
    return load_fixture("imdb_full")


@pytest.fixture
def mnist_phase():
    return load_fixture("mnist_phase")


# acceptance summary: test_acceptance.py appends (criterion, passed, detail)
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: int(r[0].split()[0][2:])):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
