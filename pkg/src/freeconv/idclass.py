"""Infinite-divisibility machinery: triplets, regularity, and scans.

Triplets are stored in the truncated form (compensation of jumps in
[-1, 1]); the regular form compensates nothing and carries the drift of
measures on the positive half line. Conversions between the two are
explicit and exact for atomic Levy measures.

Positivity scans solve z = 1/w + t R(w) by damped Newton with downward
continuation in the imaginary part, for a small family of analytic
R-transform models. Scans and the kurtosis statistic are evidence or
necessary conditions; regularity proper is decided at the representation
level (triplet support and drift), never from finitely many moments.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from . import catalog, ncpart
from .catalog import MeasureSpec
from .conv import IdentityReport
from .ncpart import SeqN


# ---------------------------------------------------------------------------
# Levy measures


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


@dataclass(frozen=True)
class LevyMeasure:
    """A nonnegative measure with no mass at 0, finite int min(1,t^2).

    Carried as atoms plus an optional grid plus an optional closed-form
    density on an interval. Total mass may be infinite; only the truncated
    integrals are guaranteed finite.
    """

    atoms: tuple = ()
    xs: tuple = ()
    densities: tuple = ()
    density_fn: object = None
    support: tuple = ()

    def __post_init__(self):
        atoms = tuple(sorted((loc, m) for loc, m in self.atoms))
        for loc, m in atoms:
            if loc == 0:
                raise ValueError("Levy measure cannot charge 0")
            if m <= 0:
                raise ValueError(f"atom masses must be positive, got {m}")
        object.__setattr__(self, "atoms", atoms)
        if len(self.xs) != len(self.densities):
            raise ValueError("grid abscissas and densities differ in length")
        if self.xs:
            xs = tuple(float(x) for x in self.xs)
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise ValueError("grid abscissas must be strictly increasing")
            if any(d < 0 for d in self.densities):
                raise ValueError("grid densities must be nonnegative")
            for x, d in zip(xs, self.densities):
                if abs(x) < 1e-12 and d > 0:
                    raise ValueError("grid density must vanish at 0")
        if self.density_fn is not None:
            if len(self.support) != 2 or not self.support[0] < self.support[1]:
                raise ValueError("density_fn needs support = (lo, hi), lo < hi")

    @property
    def is_zero(self) -> bool:
        return not self.atoms and not self.xs and self.density_fn is None

    def integral(self, f):
        """Integrate f against the measure; exact over exact atoms."""
        total = sum(m * f(loc) for loc, m in self.atoms)
        if self.xs:
            xs = np.asarray(self.xs, dtype=float)
            ys = np.asarray(
                [f(x) * d for x, d in zip(self.xs, self.densities)], dtype=float
            )
            total += float(np.trapezoid(ys, xs))
        if self.density_fn is not None:
            total += _quad_weighted(self.density_fn, f, *self.support)
        return total

    def truncated_mean(self):
        """int_(0,1] t dnu(t), the drift correction between conventions."""
        return self.integral(lambda t: t if 0 < t <= 1 else 0 * t)

    def min1_t_integral(self):
        """int_(0,oo) min(1,t) dnu(t); finiteness gates the regular form."""
        return self.integral(lambda t: min(1, t) if t > 0 else 0)

    def min1_t2_integral(self):
        return self.integral(lambda t: min(1, t * t))

    def total_mass(self):
        return self.integral(lambda t: 1)

    def charges_nonpositive(self, include_zero: bool = True) -> bool:
        """Whether any mass sits on (-oo, 0] (or (-oo, 0) when asked)."""
        cut = 0 if include_zero else -1e-300
        if any(loc <= cut for loc, _ in self.atoms):
            return True
        if any(x <= cut and d > 0 for x, d in zip(self.xs, self.densities)):
            return True
        if self.density_fn is not None and self.support[0] < 0:
            return True
        return False

    def moment(self, n: int):
        return self.integral(lambda t: t**n)


def _quad_weighted(fn, weight, lo, hi):
    """Integrate weight*fn over (lo,hi), splitting at -1, 0, 1.

    Divergence at 0 is probed by a local power fit before handing the
    panel to quad, whose error estimate can be fooled by nonintegrable
    endpoint singularities; anything divergent comes back as inf.
    """
    cuts = sorted({float(lo), float(hi)} | {p for p in (-1.0, 0.0, 1.0)
                                            if lo < p < hi})

    def g(x):
        return weight(x) * fn(x)

    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        for a, b in zip(cuts, cuts[1:]):
            if a == 0.0 and _diverges_at_zero(g, +1, b - a):
                return math.inf
            if b == 0.0 and _diverges_at_zero(g, -1, b - a):
                return math.inf
            val, err = quad(g, a, b, limit=200)
            if not math.isfinite(val) or err > max(1e-8, 1e-6 * abs(val)):
                return math.inf
            total += val
    return total


def _diverges_at_zero(g, direction, width) -> bool:
    """Whether g(x) ~ C |x|^{-p} with p >= 1 as x -> 0 from one side."""
    es = [min(width, 1.0) * 10.0 ** (-k) for k in (3, 5, 7)]
    vals = []
    for e in es:
        v = abs(g(direction * e))
        if not math.isfinite(v):
            return True
        vals.append(v)
    if vals[-1] <= 1e-300:
        return False
    powers = [
        math.log(v2 / v1) / math.log(e1 / e2)
        for v1, v2, e1, e2 in zip(vals, vals[1:], es, es[1:])
        if v1 > 0
    ]
    return bool(powers) and min(powers) >= 1 - 1e-6


# ---------------------------------------------------------------------------
# triplets


@dataclass(frozen=True)
class _Triplet:
    eta: object
    a: object
    levy: LevyMeasure = field(default_factory=LevyMeasure)

    def __post_init__(self):
        if self.a < 0:
            raise ValueError(f"Gaussian/semicircular part must be >= 0, got {self.a}")


class FreeTriplet(_Triplet):
    """Characteristic triplet of a freely infinitely divisible law."""


class ClassicalTriplet(_Triplet):
    """Characteristic triplet of a classically infinitely divisible law."""


def lambda_map(t: ClassicalTriplet) -> FreeTriplet:
    """The classical-to-free bijection: the identity on triplet components."""
    if not isinstance(t, ClassicalTriplet):
        raise ValueError("lambda_map takes a ClassicalTriplet")
    return FreeTriplet(t.eta, t.a, t.levy)


def lambda_inv(t: FreeTriplet) -> ClassicalTriplet:
    if not isinstance(t, FreeTriplet):
        raise ValueError("lambda_inv takes a FreeTriplet")
    return ClassicalTriplet(t.eta, t.a, t.levy)


@dataclass(frozen=True)
class RegularForm:
    """Drift plus Levy measure on (0, oo) with int min(1,t) finite.

    The law it represents has free cumulant transform
    drift*z + int (1/(1-zt) - 1) dnu(t); it is free regular exactly when
    the drift is nonnegative.
    """

    drift: object
    levy: LevyMeasure = field(default_factory=LevyMeasure)

    def __post_init__(self):
        if self.levy.charges_nonpositive():
            raise ValueError("regular form needs the Levy measure on (0, oo)")
        m1 = self.levy.min1_t_integral()
        if not (_is_exact(m1) or math.isfinite(m1)):
            raise ValueError("int min(1,t) dnu diverges; no regular form exists")

    @property
    def is_free_regular(self) -> bool:
        return self.drift >= 0

    def free_cumulants(self, order: int) -> SeqN:
        """kappa_1 = drift + int t dnu, kappa_n = int t^n dnu for n >= 2."""
        vals = [self.drift + self.levy.moment(1)]
        vals += [self.levy.moment(n) for n in range(2, order + 1)]
        return SeqN("free_cumulant", vals)


def to_regular_form(t: FreeTriplet) -> RegularForm:
    """Rewrite a free triplet without jump compensation.

    Only triplets with no semicircular part and a Levy measure on (0, oo)
    admit the reduced representation; the drift picks up the compensation
    of the small jumps: drift = eta - int_(0,1] t dnu.
    """
    if t.a > 0:
        raise ValueError(
            f"semicircular part a = {t.a} > 0: not representable in regular form"
        )
    if t.levy.charges_nonpositive():
        raise ValueError("Levy measure charges (-oo, 0]: no regular form")
    correction = t.levy.truncated_mean()
    if not (_is_exact(correction) or math.isfinite(correction)):
        raise ValueError("int min(1,t) dnu diverges; no regular form exists")
    return RegularForm(t.eta - correction, t.levy)


def from_regular_form(r: RegularForm) -> FreeTriplet:
    """Exact inverse of to_regular_form."""
    return FreeTriplet(r.drift + r.levy.truncated_mean(), 0, r.levy)


# ---------------------------------------------------------------------------
# boolean-to-free lift and compound Poisson


def bp_boolean(mu: MeasureSpec, order: int) -> SeqN:
    """Free cumulants of the boolean-to-free lift of mu.

    The lift reads mu's boolean cumulant sequence as a free cumulant
    sequence; both index the same coefficient data, so this is exact.
    """
    r = catalog.boolean_cumulants_of(mu, order)
    return SeqN("free_cumulant", r.values)


def cfp(lam, rho: MeasureSpec, order: int) -> SeqN:
    """Free cumulants of the compound free Poisson: kappa_n = lam m_n(rho)."""
    if not lam > 0:
        raise ValueError(f"rate must be positive, got {lam}")
    m = catalog.moments_of(rho, order)
    return SeqN("free_cumulant", [lam * v for v in m.values])


def cfp_regular_form(lam, rho: MeasureSpec) -> RegularForm:
    """Regular form (drift 0, Levy measure lam*rho) for atomic jump laws.

    A jump atom at 0 contributes nothing to any cumulant, so it is dropped;
    the remaining atoms must sit in (0, oo).
    """
    if not lam > 0:
        raise ValueError(f"rate must be positive, got {lam}")
    if rho.kind != "atomic":
        raise ValueError("regular form construction needs an atomic jump law")
    atoms = [(loc, lam * w) for loc, w in rho.atoms if loc != 0 and w > 0]
    return RegularForm(0, LevyMeasure(atoms=tuple(atoms)))


# ---------------------------------------------------------------------------
# symmetric factorization


def main3_factor(kappa: SeqN, tol: float = 1e-12) -> SeqN:
    """Halve a symmetric free cumulant sequence: kappa_n(sigma) = kappa_2n(mu).

    The output determines the factor sigma in the square decomposition of a
    symmetric freely infinitely divisible mu: the moments of mu^2 coincide
    with those of m (x) sigma, m the standard free Poisson.
    """
    if kappa.kind != "free_cumulant":
        raise ValueError(f"expected free cumulants, got {kappa.kind!r}")
    for n in range(1, kappa.order + 1, 2):
        if abs(float(kappa.at(n))) > tol:
            raise ValueError(
                f"input is not symmetric: cumulant {n} is {kappa.at(n)}"
            )
    half = kappa.order // 2
    return SeqN("free_cumulant", [kappa.at(2 * n) for n in range(1, half + 1)])


def main3_verification(kappa: SeqN, tol: float = 1e-10) -> IdentityReport:
    """Check moments(mu^2) = moments(m (x) sigma) for the halved factor."""
    sigma = main3_factor(kappa)
    half = sigma.order
    mu_moments = ncpart.moments_from_free_cumulants(kappa)
    lhs = SeqN("moment", [mu_moments.at(2 * n) for n in range(1, half + 1)])
    m_poisson = catalog.moments_of(
        MeasureSpec.from_law("marchenko_pastur", (1,)), half
    )
    sigma_moments = ncpart.moments_from_free_cumulants(sigma)
    rhs = ncpart.free_mult_moments(m_poisson, sigma_moments, half)
    dev = max(abs(float(a - b)) for a, b in zip(lhs.values, rhs.values))
    return IdentityReport(lhs, rhs, dev, tol)


# ---------------------------------------------------------------------------
# kurtosis


@dataclass(frozen=True)
class KurtosisResult:
    value: object
    verdict: str  # pass | fail | degenerate

    @property
    def passed(self) -> bool:
        return self.verdict != "fail"


def kurtosis_check(m, order: int = 4) -> KurtosisResult:
    """Necessary condition for free infinite divisibility: m4~/m2~^2 - 2 >= 0.

    m~ are central moments; the statistic equals kappa_4/kappa_2^2. A
    negative value rules the measure out; a nonnegative one is
    inconclusive (pass). Point masses are vacuously divisible.
    """
    if order < 4:
        raise ValueError(f"kurtosis needs moments to order 4, got {order}")
    if isinstance(m, MeasureSpec):
        m = catalog.moments_of(m, order)
    if not isinstance(m, SeqN) or m.kind != "moment":
        raise ValueError("kurtosis_check takes a moment sequence or MeasureSpec")
    if m.order < 4:
        raise ValueError(f"kurtosis needs moments to order 4, got {m.order}")
    m1, m2, m3, m4 = (m.at(n) for n in range(1, 5))
    c2 = m2 - m1 * m1
    c4 = m4 - 4 * m1 * m3 + 6 * m1 * m1 * m2 - 3 * m1**4
    if c2 == 0:
        return KurtosisResult(None, "degenerate")
    if c2 < 0:
        raise ValueError(f"not a moment sequence: central m2 = {c2} < 0")
    value = c4 / (c2 * c2) - 2
    return KurtosisResult(value, "fail" if value < 0 else "pass")


# ---------------------------------------------------------------------------
# analytic R-transform models and positivity scans


@dataclass(frozen=True)
class RModel:
    """Analytic model of an R-transform R(w) = sum kappa_n w^(n-1).

    Kinds: 'semicircle' (mean, var), 'cfp' (drift, rate, atoms of the jump
    law), 'poly' (truncated cumulant polynomial; evidence only, valid where
    the series converges).
    """

    kind: str
    params: tuple

    @staticmethod
    def semicircle(mean, var) -> "RModel":
        if var < 0:
            raise ValueError("variance must be >= 0")
        return RModel("semicircle", (float(mean), float(var)))

    @staticmethod
    def free_poisson(rate) -> "RModel":
        return RModel.cfp_atomic(rate, [(1, 1)])

    @staticmethod
    def cfp_atomic(lam, jump_atoms, drift=0) -> "RModel":
        if not lam > 0:
            raise ValueError(f"rate must be positive, got {lam}")
        atoms = tuple((float(a), float(p)) for a, p in jump_atoms)
        if any(p < 0 for _, p in atoms):
            raise ValueError("jump weights must be nonnegative")
        return RModel("cfp", (float(drift), float(lam), atoms))

    @staticmethod
    def poly(kappa_values) -> "RModel":
        return RModel("poly", tuple(float(v) for v in kappa_values))

    @staticmethod
    def from_cumulants(kappa: SeqN, rel_tol: float = 1e-12) -> "RModel":
        """Recognize exact semicircular or geometric (single-jump compound
        Poisson) cumulant patterns; fall back to the truncated polynomial."""
        if kappa.kind != "free_cumulant":
            raise ValueError(f"expected free cumulants, got {kappa.kind!r}")
        vals = [float(v) for v in kappa.values]
        if len(vals) < 2:
            return RModel.poly(vals)
        if all(v == 0 for v in vals[2:]) and vals[1] >= 0:
            return RModel.semicircle(vals[0], vals[1])
        if len(vals) >= 4 and vals[1] != 0 and vals[2] != 0:
            a = vals[2] / vals[1]
            scale = max(abs(v) for v in vals)
            if all(
                abs(vals[j + 1] - a * vals[j]) <= rel_tol * scale * max(1, abs(a))
                for j in range(1, len(vals) - 1)
            ):
                lam = vals[1] / (a * a)
                drift = vals[0] - lam * a
                return RModel.cfp_atomic(lam, [(a, 1)], drift)
        return RModel.poly(vals)

    # -- evaluation ------------------------------------------------------

    def r(self, w):
        if self.kind == "semicircle":
            mean, var = self.params
            return mean + var * w
        if self.kind == "cfp":
            drift, lam, atoms = self.params
            total = drift + 0 * w
            for a, p in atoms:
                total = total + lam * p * a / (1 - a * w)
            return total
        coeffs = self.params
        total = 0 * w
        for c in reversed(coeffs):
            total = total * w + c
        return total

    def dr(self, w):
        if self.kind == "semicircle":
            return self.params[1] + 0 * w
        if self.kind == "cfp":
            _, lam, atoms = self.params
            total = 0 * w
            for a, p in atoms:
                total = total + lam * p * a * a / (1 - a * w) ** 2
            return total
        coeffs = self.params
        total = 0 * w
        for n in reversed(range(1, len(coeffs))):
            total = total * w + n * coeffs[n]
        return total

    @property
    def kappa1(self) -> float:
        return float(self.r(0.0))

    @property
    def kappa2(self) -> float:
        return float(self.dr(0.0))


def solve_g(model: RModel, t, z, w0=None, tol: float = 1e-14,
            max_iter: int = 100):
    """Solve z = 1/w + t R(w) for w = G(z) by damped Newton.

    Returns (w, converged mask). The seed defaults to 1/z; pass the
    solution at a nearby z to continue along a path.
    """

    def residual(w, zs):
        with np.errstate(all="ignore"):
            f = 1 / w + t * model.r(w) - zs
        # iterates that hit a pole count as maximally bad so the
        # backtracking line search rejects them
        return np.where(np.isfinite(f), f, complex(np.inf))

    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if w0 is None:
        # damped Picard warmup: w -> 1/(z - t R(w)) preserves the lower
        # half plane for these models and pulls the seed into Newton's
        # basin, preventing far-field runaway
        w = 1 / z
        for _ in range(10):
            with np.errstate(all="ignore"):
                nxt = 1 / (z - t * model.r(w))
            w = np.where(np.isfinite(nxt), 0.5 * w + 0.5 * nxt, 1 / z)
            w = np.where(w.imag <= 0, w, np.conj(w))
    else:
        w = np.asarray(w0, dtype=complex).copy()
    if w.shape != z.shape:
        raise ValueError("seed shape does not match z")
    resid = residual(w, z)
    for _ in range(max_iter):
        with np.errstate(all="ignore"):
            active = ~(np.abs(resid) <= tol)
        if not active.any():
            break
        wa, za = w[active], z[active]
        fa = resid[active]
        with np.errstate(all="ignore"):
            deriv = -1 / wa**2 + t * model.dr(wa)
            deriv = np.where(
                np.isfinite(deriv) & (np.abs(deriv) > 1e-300), deriv, 1e-300
            )
            step = -fa / deriv
            step = np.where(np.isfinite(step), step, 0.1)
        # backtrack while the residual grows
        new_w = wa + step
        new_f = residual(new_w, za)
        for _ in range(30):
            with np.errstate(all="ignore"):
                worse = ~(np.abs(new_f) <= np.abs(fa))
            if not worse.any():
                break
            step = np.where(worse, step / 2, step)
            new_w = wa + step
            new_f = residual(new_w, za)
        # a Cauchy transform of the upper half plane lies in the closed
        # lower one; reflect iterates that stray to the wrong sheet
        wrong = new_w.imag > 0
        if wrong.any():
            new_w = np.where(wrong, np.conj(new_w), new_w)
            new_f = residual(new_w, za)
        # |G(z)| <= 1/Im z, so iterates past a few times that bound are
        # runaway; project them back onto the admissible disk
        with np.errstate(all="ignore"):
            bound = 4 / za.imag
            big = ~(np.abs(new_w) <= bound)
        if big.any():
            new_w = np.where(big, new_w * (bound / np.abs(new_w)), new_w)
            new_f = residual(new_w, za)
        w[active] = new_w
        resid[active] = new_f
    with np.errstate(all="ignore"):
        return w, np.abs(resid) <= math.sqrt(tol)


_IMAG_LADDER = (1.0, 0.3, 0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4, 1e-4,
                1e-5, 1e-6, 1e-7, 1e-8, 1e-9)


def _continued_solve(model: RModel, t, xs, imag: float = 1e-9):
    """Solve down the imaginary ladder, reusing each level as the seed."""
    xs = np.asarray(xs, dtype=float)
    levels = [d for d in _IMAG_LADDER if d > imag] + [imag]
    w = None
    conv = None
    for d in levels:
        w, conv = solve_g(model, t, xs + 1j * d, w0=w)
    return w, conv


def _extrapolated_density(model: RModel, t, xs, eps: float = 4e-9):
    """Boundary density by Richardson extrapolation over eps, eps/2, eps/4.

    Cancels the terms linear in the height, so Lorentzian shoulders of
    nearby atoms drop out instead of polluting edge detection.
    """
    xs = np.asarray(xs, dtype=float)
    w1, conv = _continued_solve(model, t, xs, imag=eps)
    w2, c2 = solve_g(model, t, xs + 1j * eps / 2, w0=w1)
    w3, c3 = solve_g(model, t, xs + 1j * eps / 4, w0=w2)
    f1, f2, f3 = (-w.imag / math.pi for w in (w1, w2, w3))
    return (8 * f3 - 6 * f2 + f1) / 3, conv & c2 & c3


@dataclass(frozen=True)
class ScanPoint:
    t: float
    left_edge: float
    atoms: tuple
    converged: bool


@dataclass(frozen=True)
class ScanResult:
    points: tuple
    threshold: float
    edge_tol: float

    @property
    def regular_evidence(self) -> bool:
        """All scanned left edges clear of the negative axis."""
        return all(
            p.left_edge is not None and p.left_edge >= -self.edge_tol
            for p in self.points
        )

    def edges(self):
        return [(p.t, p.left_edge) for p in self.points]


def _scan_one(model: RModel, t, threshold, grid_points):
    k1, k2 = model.kappa1, model.kappa2
    spread = 4 * math.sqrt(max(t * k2, 1e-6)) + 0.5
    lo, hi = t * k1 - spread, t * k1 + spread
    xs = np.linspace(lo, hi, grid_points)
    h = xs[1] - xs[0]

    # atom pass: a point mass shows up as ~mass/(pi d) at height d ~ grid step
    w_atom, _ = _continued_solve(model, t, xs, imag=h)
    dens_atom = -w_atom.imag / math.pi
    atom_idx = np.flatnonzero(dens_atom > 0.05 / h)
    atoms = []
    for cluster in np.split(atom_idx, np.flatnonzero(np.diff(atom_idx) > 1) + 1):
        if cluster.size:
            atoms.append(float(xs[cluster[np.argmax(dens_atom[cluster])]]))

    dens, conv = _extrapolated_density(model, t, xs)
    above = np.flatnonzero(dens > threshold)
    edge = None
    if above.size:
        i = above[0]
        if i == 0:
            edge = float(xs[0])
        else:
            a, b = float(xs[i - 1]), float(xs[i])

            def d_at(x):
                vals, _ = _extrapolated_density(model, t, np.array([x]))
                return float(vals[0])

            while b - a > 2e-5:
                mid = (a + b) / 2
                if d_at(mid) > threshold:
                    b = mid
                else:
                    a = mid
            edge = (a + b) / 2
    if atoms:
        edge = min(atoms) if edge is None else min(edge, min(atoms))
    return ScanPoint(float(t), edge, tuple(atoms), bool(np.all(conv)))


def positivity_scan(
    model,
    ts,
    threshold: float = 1e-6,
    edge_tol: float = 1e-3,
    grid_points: int = 601,
    jobs: int | None = None,
) -> ScanResult:
    """Estimate the left support edge of mu^{boxplus t} for each t.

    The edge is the smallest point where the extrapolated density exceeds
    the threshold, or a detected atom location if further left. Evidence
    only: atoms of mass below roughly 0.15 are invisible, and polynomial
    models are trusted only inside their convergence region.
    """
    if isinstance(model, SeqN):
        model = RModel.from_cumulants(model)
    ts = [float(t) for t in ts]
    if any(t <= 0 for t in ts):
        raise ValueError("scan times must be positive")
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            points = list(
                pool.map(lambda t: _scan_one(model, t, threshold, grid_points), ts)
            )
    else:
        points = [_scan_one(model, t, threshold, grid_points) for t in ts]
    return ScanResult(tuple(points), threshold, edge_tol)


# ---------------------------------------------------------------------------
# divergence test near zero


@dataclass(frozen=True)
class Thm110Result:
    condition: str  # atom_at_zero | integral_divergent | integral_convergent | inconclusive
    regular: object  # True / False / None
    shells: tuple
    ratios: tuple


def thm110_check(
    mu: MeasureSpec, k_min: int = 2, k_max: int = 14
) -> Thm110Result:
    """Classify a positive FID measure by its behavior at 0.

    Mass at 0 or a divergent int_0^1 dmu(x)/x certifies free regularity;
    the divergence is probed through dyadic shells s_k = int over
    [2^-(k+1), 2^-k] of dmu/x. Growing or flat shell sums (tail ratio
    >= 0.95) indicate divergence; decisively shrinking ones (<= 0.8)
    convergence; anything between is reported as inconclusive rather than
    guessed. The criterion is one-directional: a convergent integral
    implies nothing, so those verdicts carry regular = None.
    """
    mass0 = mu.mass_at_zero
    if mass0 is None:
        raise ValueError("cannot resolve mass at 0 for this measure form")
    if mass0 > 0:
        return Thm110Result("atom_at_zero", True, (), ())

    def shell(k):
        lo, hi = 2.0 ** -(k + 1), 2.0**-k
        total = 0.0
        if mu.kind == "atomic":
            for loc, wgt in mu.atoms:
                if loc < 0:
                    raise ValueError("measure must live on [0, oo)")
                if lo < loc <= hi:
                    total += float(wgt) / float(loc)
            return total
        if mu.kind == "law":
            for loc, wgt in catalog.law_atoms(mu.law, mu.params):
                mapped = mu.scale * loc + mu.offset
                if lo < mapped <= hi:
                    total += float(wgt) / float(mapped)
            val, _ = quad(
                lambda x: catalog.catalog_density(
                    mu.law, mu.params, (x - mu.offset) / mu.scale
                )
                / abs(mu.scale)
                / x,
                lo,
                hi,
                limit=100,
            )
            return total + val
        if mu.kind == "grid":
            xs = np.asarray(mu.xs, dtype=float)
            if xs[0] < -1e-12:
                raise ValueError("measure must live on [0, oo)")
            for loc, wgt in mu.atoms:
                if lo < loc <= hi:
                    total += float(wgt) / float(loc)
            pts = np.linspace(lo, hi, 65)
            dens = np.interp(pts, xs, np.asarray(mu.densities, dtype=float),
                             left=0.0, right=0.0)
            return total + float(np.trapezoid(dens / pts, pts))
        raise ValueError(f"no pointwise density for kind {mu.kind!r}")

    if mu.kind == "grid":
        # shells narrower than the grid spacing carry no information
        spacing = min(
            b - a for a, b in zip(mu.xs, mu.xs[1:])
        )
        while k_max > k_min and 2.0 ** -(k_max + 1) < 4 * spacing:
            k_max -= 1

    shells = [shell(k) for k in range(k_min, k_max + 1)]
    floor = 1e-300
    if all(s <= floor for s in shells[-4:]):
        return Thm110Result(
            "integral_convergent", None, tuple(shells), ()
        )
    ratios = [
        b / a for a, b in zip(shells, shells[1:]) if a > floor and b > floor
    ]
    tail = ratios[-4:]
    score = float(np.median(tail)) if tail else 0.0
    if score >= 0.95:
        return Thm110Result("integral_divergent", True, tuple(shells), tuple(ratios))
    if score <= 0.8:
        return Thm110Result("integral_convergent", None, tuple(shells), tuple(ratios))
    return Thm110Result("inconclusive", None, tuple(shells), tuple(ratios))


# ---------------------------------------------------------------------------
# free Meixner Levy measures


@dataclass(frozen=True)
class MeixnerResult:
    levy: LevyMeasure
    support: tuple
    regular: bool
    min1_integral: float
    total_mass: float


def levy_meixner(a, b, c) -> MeixnerResult:
    """Levy measure with density c sqrt(4b - (x-a)^2) / (pi x^2).

    Supported on (a - 2 sqrt(b), a + 2 sqrt(b)); when that interval stays
    in [0, oo) the measure fits the regular form (drift 0 and up).
    """
    if not b > 0:
        raise ValueError(f"b must be positive, got {b}")
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    a, b, c = float(a), float(b), float(c)
    lo, hi = a - 2 * math.sqrt(b), a + 2 * math.sqrt(b)

    def density(x):
        inside = 4 * b - (x - a) ** 2
        if inside <= 0 or x == 0:
            return 0.0
        return c * math.sqrt(inside) / (math.pi * x * x)

    levy = LevyMeasure(density_fn=density, support=(lo, hi))
    min1 = levy.min1_t_integral()
    regular = lo >= 0 and math.isfinite(min1)
    return MeixnerResult(levy, (lo, hi), regular, min1, levy.total_mass())


# ---------------------------------------------------------------------------
# Voiculescu generating pairs (closed forms only)


@dataclass(frozen=True)
class VoiculescuPair:
    """(gamma, tau): phi(z) = gamma + int (1+xz)/(z-x) dtau(x), tau finite."""

    gamma: object
    tau_atoms: tuple = ()

    def __post_init__(self):
        if any(m < 0 for _, m in self.tau_atoms):
            raise ValueError("tau must be nonnegative")

    @property
    def tau_mass(self):
        return sum(m for _, m in self.tau_atoms)

    def phi(self, z):
        total = self.gamma + 0 * z
        for x, m in self.tau_atoms:
            total = total + m * (1 + x * z) / (z - x)
        return total


def voiculescu_pair(mu: MeasureSpec) -> VoiculescuPair:
    """Closed-form generating pair for semicircle and Marchenko-Pastur specs.

    The pair shifts with the offset (gamma += c) and otherwise follows the
    compound Poisson formulas; laws without a closed-form pair are refused.
    """
    if mu.kind != "law":
        raise ValueError("closed-form pairs exist only for catalog laws")
    if mu.law == "semicircle":
        mean, var = mu.params
        g = mu.scale * mean + mu.offset
        v = mu.scale * mu.scale * var
        return VoiculescuPair(g, ((0, v),) if v != 0 else ())
    if mu.law == "marchenko_pastur":
        (rate,) = mu.params
        jump = mu.scale
        return voiculescu_pair_cfp(rate, [(jump, 1)], shift=mu.offset)
    raise ValueError(f"no closed-form Voiculescu pair for law {mu.law!r}")


def voiculescu_pair_cfp(lam, jump_atoms, shift=0) -> VoiculescuPair:
    """Pair of a compound free Poisson with an atomic jump law.

    gamma_j = lam p_j a_j/(1+a_j^2) and tau = sum lam p_j a_j^2/(1+a_j^2)
    at the jump locations; exact for exact inputs.
    """
    if not lam > 0:
        raise ValueError(f"rate must be positive, got {lam}")
    gamma = shift
    atoms = []
    for a, p in jump_atoms:
        if p < 0:
            raise ValueError("jump weights must be nonnegative")
        if p == 0 or a == 0:
            continue
        gamma = gamma + lam * p * a / (1 + a * a)
        atoms.append((a, lam * p * a * a / (1 + a * a)))
    return VoiculescuPair(gamma, tuple(sorted(atoms)))


@dataclass(frozen=True)
class Prop345Result:
    left_extremity: object
    phi_at_zero: object
    passed: bool


def prop345_check(pair: VoiculescuPair) -> Prop345Result:
    """Regularity test on the generating pair: a(tau) >= 0 and phi(-0) >= 0.

    phi(-0) = gamma - sum tau_j/x_j over the atoms; an atom of tau at 0
    sends the limit to -infinity.
    """
    if not pair.tau_atoms:
        return Prop345Result(math.inf, pair.gamma, pair.gamma >= 0)
    left = min(x for x, _ in pair.tau_atoms)
    if any(x == 0 and m > 0 for x, m in pair.tau_atoms):
        phi0 = -math.inf
    else:
        phi0 = pair.gamma - sum(m / x for x, m in pair.tau_atoms)
    passed = left >= 0 and phi0 >= 0
    return Prop345Result(left, phi0, passed)


# ---------------------------------------------------------------------------
# shifting a compactly supported FID law breaks regularity


@dataclass(frozen=True)
class WitnessSide:
    name: str
    model_kind: str
    triplet_error: str | None
    scan: ScanResult | None
    fails: bool


@dataclass(frozen=True)
class WitnessReport:
    sides: tuple

    @property
    def any_failure(self) -> bool:
        return any(s.fails for s in self.sides)


def shift_nonregular_witness(
    kappa: SeqN, support, ts=(0.25, 0.5)
) -> WitnessReport:
    """Shift a compactly supported FID law to the positive axis both ways
    and report which version fails regularity.

    Side one shifts mu by -lo so its support starts at 0; side two does the
    same with the reflection. Each side gets the triplet test when the
    cumulant pattern pins an exact model, and a positivity scan always.
    """
    if kappa.kind != "free_cumulant":
        raise ValueError(f"expected free cumulants, got {kappa.kind!r}")
    lo, hi = support
    if not lo < hi:
        raise ValueError("support must be an interval (lo, hi)")
    shifted = list(kappa.values)
    shifted[0] = shifted[0] - lo
    reflected = [(-1) ** n * v for n, v in enumerate(kappa.values, 1)]
    reflected[0] = reflected[0] + hi

    sides = []
    for name, vals in (("shift_left_to_zero", shifted),
                       ("reflect_shift_right_to_zero", reflected)):
        seq = SeqN("free_cumulant", vals)
        model = RModel.from_cumulants(seq)
        triplet_error = None
        if model.kind == "semicircle":
            mean, var = model.params
            try:
                to_regular_form(FreeTriplet(mean, var))
            except ValueError as exc:
                triplet_error = str(exc)
        elif model.kind == "cfp":
            drift, lam, atoms = model.params
            try:
                levy = LevyMeasure(
                    atoms=tuple((a, lam * p) for a, p in atoms if p > 0)
                )
                form = RegularForm(drift, levy)
                if not form.is_free_regular:
                    triplet_error = f"negative drift {drift}"
            except ValueError as exc:
                triplet_error = str(exc)
        scan = positivity_scan(model, ts)
        fails = triplet_error is not None or not scan.regular_evidence
        sides.append(WitnessSide(name, model.kind, triplet_error, scan, fails))
    return WitnessReport(tuple(sides))
