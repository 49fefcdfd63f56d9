"""Kernel layer: weight functions against their defining series, the
killed and departure kernels against hand-expanded determinants and
brute lattice sums, the weight-kernel pair (exact inverse property), and
the certified truncation contracts."""

import itertools
import math
import random
from fractions import Fraction

import pytest

from tandemq import linalg
from tandemq.errors import PreconditionError
from tandemq.kernels import (
    TruncationBox,
    chamber_to_departure,
    chamber_to_queue,
    change_of_measure,
    departure_kernel,
    departure_kernel_via_intertwining,
    departure_to_chamber,
    departure_to_chamber_support,
    departures_to_queue,
    killed_poisson_kernel,
    noncrossing_prob,
    queue_kernel_sum,
    queue_to_chamber_support,
    queue_to_departures,
    taylor_weight,
    window_weight,
)
from tandemq.lattice import ordered_tuples
from tandemq.numerics import poisson_cap
from tandemq.symfunc import window_e, window_h


def chamber_points(lo, hi, n):
    for z in itertools.product(range(hi, lo - 1, -1), repeat=n):
        if all(z[i] >= z[i + 1] for i in range(n - 1)):
            yield z


def test_taylor_weight_values():
    assert taylor_weight(0, 3.5) == 1.0
    assert taylor_weight(3, Fraction(2)) == Fraction(4, 3)
    assert taylor_weight(2, -1) == 0
    assert taylor_weight(-1, 2.0) == 0
    assert taylor_weight(5, 0.0) == 0.0
    assert taylor_weight(0, 0.0) == 1.0


def test_taylor_weight_log_domain_consistency():
    # n > 34 switches to exp(n log t - lgamma); must agree with the
    # exact route to float accuracy
    for n in (35, 50, 80):
        exact = float(taylor_weight(n, Fraction(5, 2)))
        assert abs(taylor_weight(n, 2.5) - exact) <= 1e-13 * exact


def test_window_weight_diagonal_and_t0():
    assert window_weight(4, 1.5, (1, 2, 3), 2, 2) == taylor_weight(4, 1.5)
    # j < i at t=0: only the k=0 term survives and w_0(0)=1
    assert window_weight(0, 0.0, (1, 2, 3), 2, 0) == 1.0
    # i < j at t=0: the k=-n term
    assert window_weight(-1, 0, (1, 2, 3), 0, 2) == window_h(1, 0, 2, (1, 2, 3))


def test_window_weight_finite_sum_exact():
    nu = (Fraction(1), Fraction(2), Fraction(7, 2))
    t = Fraction(3, 4)
    for n in range(-2, 4):
        want = sum(
            (-1) ** k * window_e(k, 0, 2, nu) * taylor_weight(n + k, t)
            for k in range(3)
        )
        assert window_weight(n, t, nu, 2, 0) == want


def test_window_weight_series_hits_exponential():
    # h-window over a single rate 2: sum_k 2^k t^k/k! = e^(2t)
    got = window_weight(0, 1.0, (1, 2), 0, 1)
    assert abs(got - math.e**2) <= 1e-12 * math.e**2


def test_window_weight_index_bounds():
    with pytest.raises(PreconditionError):
        window_weight(0, 1.0, (1, 2), 0, 5)


# ---------------------------------------------------------------------------
# killed Poisson kernel


def brute_killed(z, z2, t, nu):
    n1 = len(nu)
    mat = [
        [taylor_weight(z2[a] - z[b] - a + b, Fraction(t)) for b in range(n1)]
        for a in range(n1)
    ]
    out = linalg.det(mat)
    for k in range(n1):
        out *= Fraction(nu[k]) ** (z2[k] - z[k])
    return float(out) * math.exp(-sum(nu) * t)


def test_killed_kernel_at_origin():
    for nu, t in [((1, 2), 0.7), ((1, 2, 4), 1.3)]:
        got = killed_poisson_kernel((0,) * len(nu), (0,) * len(nu), t, nu)
        assert abs(got - math.exp(-sum(nu) * t)) <= 1e-14


def test_killed_kernel_hand_example():
    got = killed_poisson_kernel((0, 0), (1, 0), 1.0, (1, 1))
    assert abs(got - math.exp(-2.0)) <= 1e-14


def test_killed_kernel_no_decrease():
    assert killed_poisson_kernel((2, 1), (1, 1), 0.5, (1, 2)) == 0.0


def test_killed_kernel_matches_brute_determinant():
    rng = random.Random(3)
    for _ in range(25):
        n1 = rng.randint(2, 3)
        nu = tuple(rng.randint(1, 4) for _ in range(n1))
        z = tuple(sorted((rng.randint(0, 3) for _ in range(n1)), reverse=True))
        z2 = tuple(sorted((z[k] + rng.randint(0, 3) for k in range(n1)), reverse=True))
        t = rng.choice([0.25, 1.0, 2.0])
        got = killed_poisson_kernel(z, z2, t, nu)
        want = brute_killed(z, z2, t, nu)
        assert abs(got - want) <= 1e-13
        assert -1e-12 <= got <= 1.0 + 1e-12


def test_change_of_measure_relates_kernels():
    z, z2, t = (1, 0), (3, 1), 0.8
    base = killed_poisson_kernel(z, z2, t, (1, 2))
    other = killed_poisson_kernel(z, z2, t, (3, 5))
    factor = change_of_measure(z, z2, t, (1, 2), (3, 5))
    assert abs(base - other * factor) <= 1e-12 * abs(base)
    assert change_of_measure(z, z2, t, (1, 2), (1, 2)) == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# departure kernel


def test_departure_kernel_short_time_diagonal():
    v = departure_kernel((1, 0), (1, 0), 1e-9, (1, 2))
    assert abs(v - 1.0) <= 1e-8


def test_departure_kernel_zero_below_start():
    assert abs(departure_kernel((2, 1), (1, 1), 1.0, (1, 2))) <= 1e-15


def test_departure_kernel_row_sums_to_one():
    nu, t, d = (1.0, 2.0), 1.0, (0, 0)
    box = TruncationBox.for_poisson(d, t, nu, 1e-12)
    total = sum(
        departure_kernel(d, d2, t, nu)
        for d2 in ordered_tuples(list(d), list(box.bounds))
    )
    assert abs(total - 1.0) <= box.tail_bound + 1e-11


def test_departure_kernel_vs_intertwining_points():
    for d, d2, t, nu in [
        ((0, 0), (0, 0), 0.5, (1, 2)),
        ((0, 0), (3, 1), 1.0, (1, 2)),
        ((2, 1, 0), (3, 2, 1), 1.0, (1, 2, 3)),
        ((1, 1, 0), (4, 1, 0), 0.25, (3, 1, 2)),
    ]:
        direct = departure_kernel(d, d2, t, nu)
        kv = departure_kernel_via_intertwining(d, d2, t, nu, tol=1e-10)
        assert abs(direct - kv.value) <= kv.abs_error + 1e-9


def test_departure_kernel_via_intertwining_below_start():
    kv = departure_kernel_via_intertwining((2, 0), (1, 0), 1.0, (1, 2), tol=1e-10)
    assert abs(kv.value) <= kv.abs_error + 1e-10


def test_chapman_kolmogorov_exact_middle_sum():
    # phi_{t+s}(d,d2) = sum over the finite set d <= m <= d2 of
    # phi_t(d,m) phi_s(m,d2); exactly finite since departures never decrease
    d, d2, nu = (0, 0), (3, 1), (1.0, 2.0)
    t, s = 0.6, 0.9
    lhs = departure_kernel(d, d2, t + s, nu)
    mids = [
        m
        for m in chamber_points(0, max(d2), 2)
        if all(d[k] <= m[k] <= d2[k] for k in range(2))
    ]
    rhs = sum(departure_kernel(d, m, t, nu) * departure_kernel(m, d2, s, nu) for m in mids)
    assert abs(lhs - rhs) <= 1e-12


# ---------------------------------------------------------------------------
# weight kernels


def test_chamber_to_departure_basics():
    nu = (Fraction(1), Fraction(2), Fraction(3))
    assert chamber_to_departure((0, 0, 0), (0, 0, 0), nu) == 1
    assert chamber_to_departure((2, 1, 1), (2, 1, 0), nu) == 0  # z_N != d_N


def test_chamber_to_departure_two_routes():
    rng = random.Random(19)
    for _ in range(20):
        n1 = rng.randint(2, 3)
        nu = tuple(Fraction(rng.randint(1, 7), rng.randint(1, 3)) for _ in range(n1))
        z = tuple(sorted((rng.randint(0, 4) for _ in range(n1)), reverse=True))
        d = tuple(sorted((rng.randint(0, 4) for _ in range(n1)), reverse=True))
        det = chamber_to_departure(z, d, nu, method="determinant")
        gt = chamber_to_departure(z, d, nu, method="gt_sum")
        assert det == gt


def test_departure_to_chamber_at_origin():
    nu = (Fraction(2), Fraction(5), Fraction(3))
    zero = (0, 0, 0)
    assert departure_to_chamber(zero, zero, nu) == 1
    supp = departure_to_chamber_support(zero, nu)
    assert supp == [(zero, 1)]


def test_queue_to_chamber_single_station_support():
    # one station, q jobs: two-point support, weights 1 and -nu1/nu0
    nu = (Fraction(1), Fraction(2))
    supp = dict(queue_to_chamber_support((2,), nu))
    assert set(supp) <= {(2, 0), (1, 0)}
    assert supp[(2, 0)] == 1
    assert supp[(1, 0)] == -Fraction(2, 1)  # -nu1/nu0 with nu0 = 1


def test_inverse_pair_small_sweep():
    """sum_z departure_to_chamber(d,z) chamber_to_departure(z,d2) = 1(d=d2),
    exactly in rationals."""
    nu = (Fraction(3), Fraction(7), Fraction(2))
    points = list(chamber_points(0, 3, 3))
    for d in points:
        supp = departure_to_chamber_support(d, nu)
        for d2 in points:
            total = sum(v * chamber_to_departure(z, d2, nu) for z, v in supp)
            assert total == (1 if d == d2 else 0)


def test_queue_inverse_pair():
    nu = (Fraction(2), Fraction(3), Fraction(5))
    queues = list(itertools.product(range(3), repeat=2))
    for q in queues:
        supp = queue_to_chamber_support(q, nu)
        for q2 in queues:
            total = sum(v * chamber_to_queue(z, q2, nu) for z, v in supp)
            assert total == (1 if q == q2 else 0)


def test_cauchy_binet_exact():
    """sum over strictly decreasing tuples of det[xi_a(u_b)] det[psi_b(u_a)]
    equals det of the inner-product matrix, exactly."""
    rng = random.Random(5)
    for _ in range(10):
        n1 = rng.randint(2, 3)
        m = 6
        xi = [[Fraction(rng.randint(-3, 3)) for _ in range(m)] for _ in range(n1)]
        psi = [[Fraction(rng.randint(-3, 3)) for _ in range(m)] for _ in range(n1)]
        lhs = 0
        for u in itertools.combinations(range(m - 1, -1, -1), n1):
            a_det = linalg.det([[xi[a][u[b]] for b in range(n1)] for a in range(n1)])
            b_det = linalg.det([[psi[b][u[a]] for b in range(n1)] for a in range(n1)])
            lhs += a_det * b_det
        rhs = linalg.det(
            [
                [sum(xi[a][u] * psi[b][u] for u in range(m)) for b in range(n1)]
                for a in range(n1)
            ]
        )
        assert lhs == rhs


# ---------------------------------------------------------------------------
# noncrossing probability and truncation contracts


def test_noncrossing_trivial_cases():
    assert noncrossing_prob((0, 0), 0.0, (1, 2)) == (1.0, 0.0)
    assert noncrossing_prob((5,), 100.0, (3,)) == (1.0, 0.0)


def test_noncrossing_vs_killed_kernel_sum():
    # survival = sum over end points of the killed kernel; independent
    # evaluation routes (per-point determinants vs the chain-sum engine)
    for x, nu, t in [((0, 0), (1.0, 2.0), 1.0), ((2, 1, 0), (1.0, 2.0, 3.0), 0.5)]:
        kv = noncrossing_prob(x, t, nu, tol=1e-12)
        caps = [x[k] + poisson_cap(nu[k] * t, 1e-13)[0] + 2 for k in range(len(x))]
        brute = sum(
            killed_poisson_kernel(x, z2, t, nu)
            for z2 in ordered_tuples(list(x), caps)
        )
        assert abs(kv.value - brute) <= kv.abs_error + 1e-10


def test_noncrossing_decreasing_in_t():
    vals = [noncrossing_prob((0, 0), t, (1, 2), tol=1e-12).value for t in (0.5, 1, 2, 4)]
    assert all(vals[i] > vals[i + 1] for i in range(len(vals) - 1))


def test_noncrossing_rejects_bad_input():
    with pytest.raises(PreconditionError):
        noncrossing_prob((0, 1), 1.0, (1, 2))
    with pytest.raises(PreconditionError):
        noncrossing_prob((1, 0), -1.0, (1, 2))
    with pytest.raises(PreconditionError):
        noncrossing_prob((1, 0, 0), 1.0, (1, 2))


def test_truncation_box_contract():
    box = TruncationBox.for_poisson((3, 1), 2.0, (1, 2), 1e-9)
    assert box.tail_bound < 1e-9
    assert box.bounds[0] >= 3 and box.bounds[1] >= 1


def test_queue_kernel_sum_identity_time_zero():
    assert queue_kernel_sum((1, 0), (1, 0), 0.0, (1, 2, 3)) == (1.0, 0.0)
    assert queue_kernel_sum((1, 0), (0, 1), 0.0, (1, 2, 3)) == (0.0, 0.0)


# ---------------------------------------------------------------------------
# departure-vector bookkeeping


def test_queue_departure_round_trip():
    assert queue_to_departures((1, 1)) == (2, 1, 0)
    assert departures_to_queue((2, 1, 0)) == (1, 1)
    base = queue_to_departures((2, 0, 3))
    lifted = queue_to_departures((2, 0, 3), completed=4)
    assert lifted == tuple(v + 4 for v in base)
    rng = random.Random(1)
    for _ in range(20):
        q = tuple(rng.randint(0, 5) for _ in range(rng.randint(1, 4)))
        assert departures_to_queue(queue_to_departures(q)) == q


def test_queue_departure_rejects_negative():
    with pytest.raises(PreconditionError):
        queue_to_departures((1, -1))
    with pytest.raises(PreconditionError):
        departures_to_queue((1, 2))
