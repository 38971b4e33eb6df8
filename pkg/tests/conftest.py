# Add project root to sys.path so `import src...` works when pytest is run
import itertools
import sys
from fractions import Fraction
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from src.exact_math import row_reduce  # noqa: E402


@pytest.fixture
def vertex_enumeration_max():
    """Maximum of c·x over {x >= 0, A x <= b}, by solving every square system of tight constraints.

    Expects a bounded region containing the origin.
    """

    def _max(objective, rows, rhs):
        width = len(objective)
        bounds = [([Fraction(a) for a in row], Fraction(b)) for row, b in zip(rows, rhs)]
        bounds += [([Fraction(-1 if j == i else 0) for j in range(width)], Fraction(0)) for i in range(width)]
        best = None
        for tight in itertools.combinations(bounds, width):
            reduced, pivots = row_reduce([a + [b] for a, b in tight])
            if pivots != list(range(width)):
                continue
            x = [reduced[i][width] for i in range(width)]
            if all(sum(a_j * x_j for a_j, x_j in zip(a, x)) <= b for a, b in bounds):
                value = sum(Fraction(c) * x_j for c, x_j in zip(objective, x))
                best = value if best is None or value > best else best
        return best

    return _max
