import random
from fractions import Fraction as F

import pytest

from conftest import misiurewicz_grid
from lozitree.errors import DomainError
from lozitree.geom2d import BOUNDARY, INSIDE, QPoint, point_in_polygon
from lozitree.lozi import (
    check_trapping,
    eigen_left,
    eigen_right,
    fixed_points,
    forward,
    in_misiurewicz,
    inverse,
    iterate,
    jacobian_det,
    make_params,
)
from lozitree.qfield import QScalar


def test_fixed_points_running_example(P):
    assert P.X == P.point(F(10, 23), F(9, 46))
    assert P.Y == P.point(F(-5, 6), F(-3, 8))
    assert forward(P, P.X) == P.X
    assert forward(P, P.Y) == P.Y


def test_fold_line_images(P):
    for y in (F(0), F(-7, 3), F(5, 11)):
        assert forward(P, P.point(0, y)) == P.point(1 + y, 0)
        assert inverse(P, P.point(1 + y, 0)).x.sign() == 0


def test_inverse_round_trips(P):
    assert inverse(P, forward(P, P.point(1, 1))) == P.point(1, 1)
    assert inverse(P, P.Z1) == P.Z
    assert forward(P, P.Z1) == P.Z2


def test_random_round_trips(P):
    rng = random.Random(7)
    for _ in range(1000):
        p = QPoint(QScalar(F(rng.randint(-900, 900), rng.randint(1, 97)), F(rng.randint(-9, 9), rng.randint(1, 13)), P.D),
                   QScalar(F(rng.randint(-900, 900), rng.randint(1, 97)), F(rng.randint(-9, 9), rng.randint(1, 13)), P.D))
        assert inverse(P, forward(P, p)) == p
        assert forward(P, inverse(P, p)) == p


def test_misiurewicz_examples():
    assert in_misiurewicz(F(7, 4), F(9, 20))
    assert not in_misiurewicz(F(3, 2), F(1, 2))
    assert not in_misiurewicz(F(7, 4), F(0))
    assert not in_misiurewicz(F(2), F(1, 2))  # 2a + b = 4.5


def test_trapping(P):
    assert check_trapping(P)
    bad = check_trapping(make_params(F(2), F(1, 2)))
    assert not bad and bad.witness is not None
    assert point_in_polygon(bad.witness, make_params(F(2), F(1, 2)).delta) not in (INSIDE, BOUNDARY)
    # the vertex Z maps onto the vertex Z^1
    assert point_in_polygon(forward(P, P.Z), P.delta) == BOUNDARY


@pytest.mark.parametrize("ab", misiurewicz_grid(20))
def test_trapping_on_grid(ab):
    assert check_trapping(make_params(*ab))


def test_jacobian(P):
    assert jacobian_det(P, P.point(1, 3)) == F(-9, 20)
    assert jacobian_det(P, P.point(-1, 3)) == F(-9, 20)
    with pytest.raises(DomainError):
        jacobian_det(P, P.point(0, 3))


def test_only_two_fixed_points(P):
    fps = fixed_points(P)
    assert set(fps) == {P.X, P.Y}
    assert P.X.x.sign() > 0 and P.X.y.sign() > 0
    assert P.Y.x.sign() < 0 and P.Y.y.sign() < 0


def test_eigenvalues(P):
    ls, lu = eigen_right(P)
    assert ls * lu == QScalar(-P.b, 0, P.D) and ls + lu == QScalar(-P.a, 0, P.D)
    assert abs(ls.to_float()) < 1 < abs(lu.to_float())
    ls, lu = eigen_left(P)
    assert ls * lu == QScalar(-P.b, 0, P.D) and ls + lu == QScalar(P.a, 0, P.D)


def test_derived_points_need_b_in_unit_interval():
    with pytest.raises(DomainError):
        make_params(F(7, 4), F(3, 2))
    with pytest.raises(DomainError):
        make_params(F(7, 4), F(0))


def test_iterate(P):
    assert iterate(P, P.Z, 2) == P.Z2
    assert iterate(P, P.X, 50) == P.X


def test_perfect_square_radicand():
    # a^2 + 4b = 4 for a = 1.8, b = 0.19: the field collapses to Q
    p = make_params(F(9, 5), F(19, 100))
    assert p.Z.x.q == 0
    assert forward(p, p.X) == p.X
