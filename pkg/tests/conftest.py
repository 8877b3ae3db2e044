import math
from fractions import Fraction

import pytest

from xclab.polytope import HPolytope, VertexSet, delta_int


def _cdd_polytope(X: VertexSet) -> HPolytope:
    cdd = pytest.importorskip("cdd")
    generators = cdd.Matrix([[1, *vertex] for vertex in X.vertices], number_type="fraction")
    generators.rep_type = cdd.RepType.GENERATOR
    H = cdd.Polyhedron(generators).get_inequalities()
    rows = []
    for i in range(H.row_size):
        # cdd rows read b + a.x >= 0
        rhs, *coeffs = (Fraction(str(value)) for value in H[i])
        values = [-value for value in coeffs] + [rhs]
        scale = math.lcm(*(value.denominator for value in values))
        integral = [int(value * scale) for value in values]
        rows.append((integral[:-1], integral[-1]))
        if i in H.lin_set:
            rows.append(([-value for value in integral[:-1]], -integral[-1]))
    return HPolytope(X.n, tuple(row for row, _ in rows), tuple(rhs for _, rhs in rows), delta_int(X.n))


@pytest.fixture
def cdd_hull():
    """Exact hull of a vertex set computed independently by pycddlib."""
    return _cdd_polytope
