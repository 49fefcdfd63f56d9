"""Determinantal transition kernels for tandem networks.

Three related Markov kernels live here, all on the ordered lattice
("chamber") of weakly decreasing integer tuples:

* the killed kernel of N+1 independent Poisson counters, which vanishes
  once the shifted coordinates z_k - k collide;
* the departure-count kernel of the tandem network (counter k records
  cumulative departures from station k, station 0 being arrivals);
* the weight kernel pair linking them: chamber_to_departure and its left
  inverse departure_to_chamber, plus their queue-indexed forms.

Matrix index convention, used verbatim everywhere: rows i carry the
destination point, columns j the source point, both running 0..N.

The intertwining weights are polynomial in the rates and evaluate
exactly over ints/Fractions.  Time-dependent kernels are numeric
(float64, or mpmath under precision="high"); every infinite lattice sum
is truncated with a certified Poisson-tail bound.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import mpmath
import numpy as np

from . import lattice, linalg, symfunc
from .errors import PreconditionError, ToleranceNotAchieved
from .numerics import Numerics, poisson_cap
from .rates import as_rates
from .symfunc import _pow


class KernelValue(NamedTuple):
    """Numeric value plus a certified bound on the truncation error.

    abs_error covers lattice truncation only; float round-off is not
    included (use precision="high" where cancellation matters)."""

    value: float
    abs_error: float


@dataclass(frozen=True)
class TruncationBox:
    """Per-coordinate upper bounds for a lattice sum and the certified
    bound on the probability mass that lies outside."""

    bounds: tuple
    tail_bound: float

    @classmethod
    def for_poisson(cls, x, t, nu, tol, numerics=None):
        """Box with M_k = x_k + cap_k such that the free Poisson motion
        started at x stays inside except with probability < tol."""
        nm = numerics or Numerics()
        nu = as_rates(nu)
        caps, tail = [], nm.scalar(0)
        for k, r in enumerate(nu):
            cap, tl = poisson_cap(nm.scalar(r) * nm.scalar(t), tol / len(nu), nm)
            caps.append(x[k] + cap)
            tail = tail + tl
        return cls(tuple(caps), float(tail))


def _check_chamber(x, name="z"):
    x = tuple(int(v) for v in x)
    for k in range(len(x) - 1):
        if x[k] < x[k + 1]:
            raise PreconditionError(f"{name}={x} is not weakly decreasing")
    return x


def _check_queue(q, n_stations, name="q"):
    q = tuple(int(v) for v in q)
    if len(q) != n_stations:
        raise PreconditionError(f"{name} must have {n_stations} entries, got {len(q)}")
    if any(v < 0 for v in q):
        raise PreconditionError(f"{name}={q} has a negative queue length")
    return q


# ---------------------------------------------------------------------------
# weight functions


def taylor_weight(n, t):
    """t^n/n! for n >= 0 and t >= 0, else 0.

    Generic over the scalar type of t (float, Fraction, mpf); large-n
    float evaluation goes through log space."""
    if n < 0 or t < 0:
        return t * 0
    if n == 0:
        return t**0
    if isinstance(t, (int, Fraction)):
        return Fraction(t) ** n / math.factorial(n)
    if isinstance(t, mpmath.mpf):
        return t**n / mpmath.factorial(n)
    t = float(t)
    if t == 0.0:
        return 0.0
    if n <= 34:
        return t**n / math.factorial(n)
    return math.exp(n * math.log(t) - math.lgamma(n + 1))


def window_weight(n, t, nu, i, j, rel_tol=None):
    """Convolution of taylor_weight with the rate-window coefficients:

        sum_{k=0}^{i-j} (-1)^k e_k(nu_{j+1..i}) taylor_weight(n+k, t)   j <= i,
        sum_{k>=0}           h_k(nu_{i+1..j}) taylor_weight(n+k, t)     i <= j.

    The second series has nonnegative terms; it is cut once a geometric
    tail bound certifies the remainder below rel_tol times the partial
    sum, with a floor of 8 terms (factorial decay of taylor_weight beats
    the polynomially-weighted geometric growth of h_k)."""
    nu = as_rates(nu)
    last = nu.n_stations
    if not (0 <= i <= last and 0 <= j <= last):
        raise PreconditionError(f"window indices ({i},{j}) out of range")
    if i == j:
        return taylor_weight(n, t)
    vals = nu.values
    if j < i:
        total = taylor_weight(n, t) * 0
        for k in range(i - j + 1):
            coef = symfunc.window_e(k, j, i, vals)
            term = coef * taylor_weight(n + k, t)
            total = total - term if k % 2 else total + term
        return total
    if t < 0:
        return t * 0
    if t == 0:
        # only the k = -n term survives
        return symfunc.window_h(-n, i, j, vals) * t**0
    if rel_tol is None:
        rel_tol = mpmath.mpf(10) ** (-mpmath.mp.dps - 2) if isinstance(t, mpmath.mpf) else 1e-16
    m = j - i
    numax = max(float(v) for v in vals[i + 1 : j + 1])
    tf = float(t)
    total = taylor_weight(n, t) * 0
    k = 0
    while True:
        total = total + symfunc.window_h(k, i, j, vals) * taylor_weight(n + k, t)
        k += 1
        if k < 8 or n + k < 1:
            continue
        # term_k <= binom(k+m-1, m-1) numax^k w_{n+k}(t), ratio
        # rho = numax t (k+m) / ((k+1)(n+k+1)) eventually < 1
        bound = math.comb(k + m - 1, m - 1) * numax**k * taylor_weight(n + k, tf)
        rho = numax * tf * (k + m) / ((k + 1) * (n + k + 1))
        if rho < 1 and bound / (1 - rho) <= rel_tol * float(total):
            return total
        if k > 200000:
            raise ToleranceNotAchieved(float(rel_tol), bound, "window series cutoff")


# ---------------------------------------------------------------------------
# killed Poisson kernel and the departure kernel


def killed_poisson_kernel(z, z2, t, nu, numerics=None):
    """Transition probability of the ordered Poisson system:

        prod_k [nu_k^(z2_k - z_k) e^(-nu_k t)] det{ w_{z2_i - z_j - i + j}(t) }

    evaluated as a determinant of rescaled Poisson pmf values
    pois(nu_i t, (z2_i - i) - (z_j - j)) * (nu_i/nu_j)^(z_j - j), which
    keeps every matrix entry within a bounded factor of a probability."""
    nu = as_rates(nu)
    nm = numerics or Numerics()
    z = _check_chamber(z, "z")
    z2 = _check_chamber(z2, "z2")
    n1 = len(nu)
    if len(z) != n1 or len(z2) != n1:
        raise PreconditionError("points must have one coordinate per rate")
    if t < 0:
        raise PreconditionError("t must be nonnegative")
    fl = nu.as_floats()
    mat = [[None] * n1 for _ in range(n1)]
    for a in range(n1):
        mu = nm.scalar(nu[a]) * nm.scalar(t)
        for b in range(n1):
            mab = (z2[a] - a) - (z[b] - b)
            pmf = nm.poisson_pmf_table(mu, mab, mab)[0]
            const = nm.scalar(fl[a] / fl[b]) ** (z[b] - b)
            mat[a][b] = pmf * const
    return linalg.det(mat)


def change_of_measure(z, z2, t, nu, lam):
    """Factor relating the killed kernels under two rate vectors:
    killed_poisson_kernel(.., nu) = killed_poisson_kernel(.., lam) * factor."""
    nu = as_rates(nu)
    lam = as_rates(lam)
    if len(nu) != len(lam):
        raise PreconditionError("rate vectors must have equal length")
    s = 0.0
    for k, (r, l) in enumerate(zip(nu.as_floats(), lam.as_floats())):
        s += (z2[k] - z[k]) * (math.log(r) - math.log(l)) - (r - l) * float(t)
    return math.exp(s)


def departure_kernel(d, d2, t, nu, numerics=None, rel_tol=None):
    """Transition probability of the departure-count vector,

        prod_k [e^(-nu_k t) nu_k^(d2_k - d_k)] det{ window_weight(d2_i - d_j - i + j, t, nu, i, j) },

    with the prefactor folded into the matrix rows/columns so entries
    stay scaled.  Exactly zero when d2_k < d_k for some k (the zero
    pattern of the lower-triangle entries forces a singular block)."""
    nu = as_rates(nu)
    nm = numerics or Numerics()
    d = _check_chamber(d, "d")
    d2 = _check_chamber(d2, "d2")
    n1 = len(nu)
    if len(d) != n1 or len(d2) != n1:
        raise PreconditionError("points must have one coordinate per rate")
    if t < 0:
        raise PreconditionError("t must be nonnegative")
    ts = nm.scalar(t)
    rates = [nm.scalar(r) for r in nu]
    rowfac = [nm.exp(-rates[a] * ts) * rates[a] ** (d2[a] - a) for a in range(n1)]
    colfac = [rates[b] ** (b - d[b]) for b in range(n1)]
    mat = [
        [
            rowfac[a] * colfac[b] * window_weight(d2[a] - d[b] - a + b, ts, nu, a, b, rel_tol)
            for b in range(n1)
        ]
        for a in range(n1)
    ]
    return linalg.det(mat)


# ---------------------------------------------------------------------------
# intertwining weights


def chamber_to_departure(z, d, nu, method="determinant"):
    """Weight kernel from ordered Poisson states to departure vectors:

        prod_k nu_k^(d_k - z_k) * det{ h-window(j,N) at z_i - d_j - i + j }.

    Nonnegative; vanishes unless z_N = d_N.  Exact over exact rates.
    method="gt_sum" instead sums the interlacing-pattern weights with
    shape z and left edge d (same value; independent route)."""
    nu = as_rates(nu)
    z = _check_chamber(z, "z")
    d = _check_chamber(d, "d")
    n1 = len(nu)
    if len(z) != n1 or len(d) != n1:
        raise PreconditionError("points must have one coordinate per rate")
    vals = nu.values
    if method == "gt_sum":
        total = 0
        for pat in symfunc.enumerate_gt(z, ledge=d):
            total = total + symfunc.gt_weight(pat, vals)
        scale = 1
        for k in range(n1):
            scale = scale * _pow(vals[k], -z[k])
        return scale * total
    if method != "determinant":
        raise PreconditionError(f"unknown method {method!r}")
    mat = [
        [symfunc.window_h(z[a] - d[b] - a + b, b, n1 - 1, vals) for b in range(n1)]
        for a in range(n1)
    ]
    out = linalg.det(mat)
    for k in range(n1):
        out = out * _pow(vals[k], d[k] - z[k])
    return out


def departure_to_chamber(d, z, nu):
    """Left inverse of chamber_to_departure:

        prod_k nu_k^(z_k - d_k) * det{ (-1)^(d_i - z_j - i + j) e-window(i,N) at d_i - z_j - i + j }.

    Exact over exact rates; support in z is finite for fixed d."""
    nu = as_rates(nu)
    d = _check_chamber(d, "d")
    z = _check_chamber(z, "z")
    n1 = len(nu)
    if len(z) != n1 or len(d) != n1:
        raise PreconditionError("points must have one coordinate per rate")
    vals = nu.values
    mat = []
    for a in range(n1):
        row = []
        for b in range(n1):
            r = d[a] - z[b] - a + b
            e = symfunc.window_e(r, a, n1 - 1, vals)
            row.append(-e if r % 2 else e)
        mat.append(row)
    out = linalg.det(mat)
    for k in range(n1):
        out = out * _pow(vals[k], z[k] - d[k])
    return out


def departure_to_chamber_support(d, nu):
    """The finite set of chamber points z with departure_to_chamber(d, z)
    nonzero, as a list of (z, value) pairs.

    Nonzero entries of the e-window matrix force z_j into the window
    [d_N - N + j, max_i(d_i - i) + j]; within it, zeroness is decided by
    exact arithmetic (float rates are converted to exact rationals, so
    structural cancellation is detected reliably)."""
    nu = as_rates(nu)
    d = _check_chamber(d, "d")
    n1 = len(nu)
    exact = as_rates(tuple(v if isinstance(v, (int, Fraction)) else Fraction(v) for v in nu))
    hi_base = max(d[a] - a for a in range(n1))
    lo = [d[n1 - 1] - (n1 - 1) + j for j in range(n1)]
    hi = [hi_base + j for j in range(n1)]
    out = []
    for z in lattice.ordered_tuples(lo, hi):
        val = departure_to_chamber(d, z, exact)
        if val != 0:
            out.append((z, val))
    return out


def queue_to_departures(q, completed=0):
    """Departure vector with the given queue contents and `completed`
    jobs already through the last station: entry k is completed plus the
    total content of stations k+1..N."""
    out = []
    acc = completed
    for v in reversed(q):
        if v < 0:
            raise PreconditionError("queue lengths must be nonnegative")
        out.append(acc)
        acc += v
    out.append(acc)
    return tuple(reversed(out))


def departures_to_queue(d):
    """Queue lengths induced by a departure vector: consecutive
    differences d_k - d_{k+1}."""
    d = _check_chamber(d, "d")
    return tuple(d[k] - d[k + 1] for k in range(len(d) - 1))


def chamber_to_queue(z, q, nu):
    """Queue-indexed weight kernel: collapses the departure target to its
    queue contents.  Only the section with completed = z_N survives."""
    nu = as_rates(nu)
    z = _check_chamber(z, "z")
    q = _check_queue(q, nu.n_stations)
    return chamber_to_departure(z, queue_to_departures(q, completed=z[-1]), nu)


def queue_to_chamber(q, z, nu):
    """Left inverse of chamber_to_queue, anchored at completed = 0."""
    nu = as_rates(nu)
    q = _check_queue(q, nu.n_stations)
    return departure_to_chamber(queue_to_departures(q), z, nu)


def queue_to_chamber_support(q, nu):
    """Finite support of queue_to_chamber(q, .) as (z, value) pairs."""
    nu = as_rates(nu)
    q = _check_queue(q, nu.n_stations)
    return departure_to_chamber_support(queue_to_departures(q), nu)


# ---------------------------------------------------------------------------
# noncrossing probability


def noncrossing_prob(x, t, nu, tol=1e-9, precision="double"):
    """P(the independent Poisson counters started at x in the chamber
    keep their order through time t), with certified truncation error.

    The killed-kernel determinant is expanded over column assignments;
    each assignment contributes a product-form term summed over strictly
    decreasing chains by prefix sums, so the cost is (N+1)! times a few
    cumulative sums over the truncation range."""
    x = _check_chamber(x, "x")
    if t < 0:
        raise PreconditionError("t must be nonnegative")
    if len(x) == 1:
        # one counter, nothing to cross
        return KernelValue(1.0, 0.0)
    nu = as_rates(nu)
    if len(x) != len(nu):
        raise PreconditionError("start point must have one coordinate per rate")
    if t == 0:
        return KernelValue(1.0, 0.0)
    nm = Numerics(precision)
    value, tail, _ = lattice.survival_probability(x, t, nu.values, tol, nm)
    return KernelValue(value, float(tail))


# ---------------------------------------------------------------------------
# departure kernel through the weight-kernel sandwich


def departure_kernel_via_intertwining(d, d2, t, nu, tol=1e-8, precision="double"):
    """Evaluates the sandwich sum_z departure_to_chamber(d,z) *
    sum_{z'} killed_kernel(z,z') * chamber_to_departure(z',d2) on a
    certified box; agrees with departure_kernel up to tol.

    The z' sum is restricted to z' >= d2 coordinatewise with z'_N pinned
    to d2_N: outside that region the weight vanishes (as a cancelling
    alternating sum, so excluding it explicitly also avoids noise).
    Points with z' not above z contribute exactly zero through the pmf
    zero pattern and need no filtering."""
    nu = as_rates(nu)
    d = _check_chamber(d, "d")
    d2 = _check_chamber(d2, "d2")
    n1 = len(nu)
    if len(d) != n1 or len(d2) != n1:
        raise PreconditionError("points must have one coordinate per rate")
    if t < 0:
        raise PreconditionError("t must be nonnegative")
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    if t == 0:
        return KernelValue(1.0 if d == d2 else 0.0, 0.0)
    supp = departure_to_chamber_support(d, nu)
    fl = nu.as_floats()

    value, bound = _sandwich_sum(
        supp, t, fl, tol, pinned_target=d2, queue_target=None, precision=precision
    )
    return KernelValue(value, bound)


def queue_kernel_sum(q, q2, t, nu, tol=1e-8, precision="double"):
    """sum_z queue_to_chamber(q,z) E_z[chamber_to_queue(X(t), q2); no
    collision by t], the queue-transition probability via the weight
    kernels.  Same truncation contract as
    departure_kernel_via_intertwining; here the target departure vector
    tracks z'_N, so all N+1 coordinates are free."""
    nu = as_rates(nu)
    q = _check_queue(q, nu.n_stations, "q")
    q2 = _check_queue(q2, nu.n_stations, "q2")
    if t < 0:
        raise PreconditionError("t must be nonnegative")
    if t == 0:
        return KernelValue(1.0 if q == q2 else 0.0, 0.0)
    supp = queue_to_chamber_support(q, nu)
    fl = nu.as_floats()
    value, bound = _sandwich_sum(
        supp, t, fl, tol, pinned_target=None, queue_target=queue_to_departures(q2), precision=precision
    )
    return KernelValue(value, bound)


def _sandwich_sum(supp, t, fl, tol, pinned_target, queue_target, precision):
    """Shared engine for the two weight-kernel sandwich sums.

    pinned_target: departure vector d2 with z'_N = d2_N pinned, or None.
    queue_target: anchored departure vector pitilde(q2) whose actual
    target is pitilde(q2) + z'_N, or None.  Exactly one is set.

    Truncation bound.  Expanding both determinants over permutations,
    each term factors over the coordinates of z' as a Poisson pmf (with
    a bounded index shift drawn from the start support) times the
    envelope of the weight kernel.  Writing y_k = z'_k - s_k with the
    virtual start s_k = k + max_supp(z_b - b) (which dominates every pmf
    shift), the term is at most

        scale * prod_k pmf-factor_k * growth_k^{y_k} * binom(y_k + shift + deg, deg)

    so grow_weighted_box applies coordinatewise.  scale collects both
    Leibniz sums, the start weights, the pmf rescaling constants, and
    the constant offsets of the growth envelope.
    """
    n1 = len(fl)
    numax = max(fl)
    numin = min(fl)
    pinned = pinned_target is not None
    tgt = pinned_target if pinned else queue_target

    zlo = [min(z[k] for z, _ in supp) for k in range(n1)]
    zhi = [max(z[k] for z, _ in supp) for k in range(n1)]
    vmax = max(z[b] - b for z, _ in supp for b in range(n1))
    vstart = [k + vmax for k in range(n1)]
    if pinned:
        # weight vanishes structurally outside z' >= d2, z'_N = d2_N
        lo = [max(tgt[k], zlo[k]) for k in range(n1)]
        free = list(range(n1 - 1))
    else:
        lo = list(zlo)
        free = list(range(n1))

    growth = [numax / fl[k] for k in range(n1)]
    if not pinned:
        # z'_N lowers every other relative coordinate: effective growth
        # prod_{k<N} nu_k/numax, always <= 1
        growth[n1 - 1] = math.prod(fl[:-1]) / numax ** (n1 - 1)

    ratmax = numax / numin
    abs_pi = sum(
        abs(float(v)) * math.prod(ratmax ** abs(z[b] - b) for b in range(n1)) for z, v in supp
    )
    deg = max(0, n1 - 2)
    # binom degree offset: r_ab <= y_a + shift across both modes
    shift = vmax + 2 * n1 - min(tgt[b] - b for b in range(n1))
    if not pinned:
        shift += n1 - lo[n1 - 1]
    shift = max(0, shift)

    scale = float(math.factorial(n1)) ** 2 * abs_pi
    for k in range(n1):
        off = vstart[k] - tgt[k] if pinned else vstart[k] - vstart[n1 - 1] - tgt[k]
        scale *= max(1.0, growth[k] ** off)
    if pinned:
        # the pinned coordinate contributes its own bounded h-window factor
        scale *= math.comb(shift + deg, deg)

    caps, bound = lattice.grow_weighted_box(
        [lo[k] for k in free],
        [vstart[k] for k in free],
        t,
        [fl[k] for k in free],
        tol,
        [growth[k] for k in free],
        deg,
        shift,
        scale,
    )
    hi = [0] * n1
    for pos, k in enumerate(free):
        hi[k] = caps[pos]
    if pinned:
        hi[n1 - 1] = tgt[n1 - 1]
        lo[n1 - 1] = tgt[n1 - 1]
    if any(lo[k] > hi[k] for k in range(n1)):
        return (Numerics("high").scalar(0) if precision == "high" else 0.0), bound

    if precision == "high":
        value = _sandwich_exact_loop(supp, t, fl, lo, hi, pinned, tgt)
        return value, bound
    value = _sandwich_batched(supp, t, fl, lo, hi, pinned, tgt)
    return value, bound


def _h_value_tables(fl, rmax, n1):
    """h-window tables h(b,N)_r for r = 0..rmax, one per column b."""
    return [
        np.array(symfunc.window_h_table(max(rmax, 0), b, n1 - 1, fl), dtype=float)
        for b in range(n1)
    ]


def _sandwich_batched(supp, t, fl, lo, hi, pinned, tgt):
    n1 = len(fl)
    idx = np.arange(n1)

    # pmf tables per row over the full increment range
    shifts = [z[b] - b for z, _ in supp for b in range(n1)]
    mlo = min(lo[k] - k for k in range(n1)) - max(shifts)
    mhi = max(hi[k] - k for k in range(n1)) - min(shifts)
    nmd = Numerics()
    pmf = [nmd.poisson_pmf_table(fl[a] * float(t), mlo, mhi) for a in range(n1)]

    rmax = max(hi) - (min(tgt) if pinned else min(tgt) + lo[n1 - 1]) + n1
    htab = _h_value_tables(fl, rmax, n1)

    total = 0.0
    for chunk in _chunked_tuples(lo, hi, 200000):
        Z = np.asarray(chunk, dtype=np.int64)
        P = Z.shape[0]
        # weight-kernel determinant stack (independent of the start z)
        if pinned:
            rel = Z
        else:
            rel = Z - Z[:, n1 - 1 : n1]
        r = rel[:, :, None] - np.asarray(tgt)[None, None, :] - idx[:, None] + idx[None, :]
        L = np.zeros((P, n1, n1))
        for b in range(n1):
            rb = r[:, :, b]
            ok = (rb >= 0) & (rb < len(htab[b]))
            L[:, :, b] = np.where(ok, htab[b][np.clip(rb, 0, len(htab[b]) - 1)], 0.0)
        rowfac = np.empty((P, n1))
        for a in range(n1):
            rowfac[:, a] = fl[a] ** (-(rel[:, a] - a).astype(float))
        colfac = np.array([fl[b] ** (tgt[b] - b) for b in range(n1)])
        L *= rowfac[:, :, None] * colfac[None, None, :]
        sL, mL = lattice.DetStackAccumulator.logdet(L)

        shifted = Z - idx[None, :]
        for z, pival in supp:
            zs = np.array([z[b] - b for b in range(n1)])
            m = shifted[:, :, None] - zs[None, None, :]
            C = np.zeros((P, n1, n1))
            for a in range(n1):
                ma = m[:, a, :] - mlo
                C[:, a, :] = pmf[a][np.clip(ma, 0, len(pmf[a]) - 1)] * (ma >= 0)
            const = np.array(
                [[(fl[a] / fl[b]) ** (z[b] - b) for b in range(n1)] for a in range(n1)]
            )
            C *= const[None, :, :]
            sC, mC = lattice.DetStackAccumulator.logdet(C)
            vals = lattice.DetStackAccumulator.combine([(sL, mL), (sC, mC)])
            total += float(pival) * vals.sum()
    return total


def _sandwich_exact_loop(supp, t, fl, lo, hi, pinned, tgt):
    nm = Numerics("high")
    n1 = len(fl)
    exact = tuple(Fraction(v) for v in fl)
    total = nm.scalar(0)
    for zp in lattice.ordered_tuples(lo, hi):
        target = tgt if pinned else tuple(tgt[k] + zp[n1 - 1] for k in range(n1))
        lam = chamber_to_departure(zp, target, exact)
        if lam == 0:
            continue
        lam_s = nm.scalar(lam)
        for z, pival in supp:
            if any(zp[k] < z[k] for k in range(n1)):
                continue
            p = killed_poisson_kernel(z, zp, t, fl, nm)
            total = total + nm.scalar(pival) * p * lam_s
    return total


def _chunked_tuples(lo, hi, chunk):
    buf = []
    for z in lattice.ordered_tuples(lo, hi):
        buf.append(z)
        if len(buf) >= chunk:
            yield buf
            buf = []
    if buf:
        yield buf
