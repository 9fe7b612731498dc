"""Light-cone lifts extracted from the factorized frame, and their geometry.

The two middle columns of the frame carry an adjoint pair of light-cone
lifts.  Recombining each column's entries (middle rows give the timelike
plane, outer rows pair up j with 2m+3-j) rotates the split basis back to
coordinates where the pairing is diag(-1, 1, ..., 1) on R^{1,2m+1}.

Exact pairs store the homogeneous components as rational functions without
the common sqrt(2)/2 factor; every quadratic check carries the rational
factor 1/2 instead, and projections cancel it entirely.  The exact columns
also sit in the rational gauge (a shared unit scalar away from the honest
frame columns), which no projective, quadratic, or derivative-flag check
can see.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import (
    ExactPathRequired,
    FirstCoordinateVanishes,
    ResidualTooLarge,
    SingularLocus,
    StepSizeTooCoarse,
)
from .frames import HolomorphicFrame
from .iwasawa import ExtendedFrame, _eval_mat, np_sharp, solve_iwasawa_float
from .scalars import (
    BiPoly,
    GR_ONE,
    GaussianRational,
    RF_I,
    RationalFn,
)

SQRT2_OVER_2 = math.sqrt(2.0) / 2.0


def _rf_float(rf: RationalFn, z: complex, floor: float = 1e-12) -> complex:
    dv = rf.den.evaluate_float(z)
    if abs(dv) < floor:
        raise SingularLocus("rational component denominator %.3e at z=%r" % (abs(dv), z))
    return rf.num.evaluate_float(z) / dv


def _combine(col, m, minus_i):
    """Recombine one frame column into R^{1,2m+1} coordinates.

    col has 2m+2 entries; the result starts with the timelike pair from the
    middle rows, then walks the outer rows j and 2m+1-j inward.
    """
    comps = [col[m] - col[m + 1], col[m] + col[m + 1]]
    for j in range(1, m + 1):
        a = col[j - 1]
        b = col[2 * m + 2 - j]
        comps.append(minus_i * (a - b))
        comps.append(a + b)
    return comps


def mink_pair_rf(xs, ys) -> RationalFn:
    """Bilinear pairing of signature (1, 2m+1) on rational-function vectors."""
    acc = -(xs[0] * ys[0])
    for a, b in zip(xs[1:], ys[1:]):
        acc = acc + a * b
    return acc


def mink_pair_np(x: np.ndarray, y: np.ndarray):
    return -x[0] * y[0] + np.dot(x[1:], y[1:])


class SurfacePair:
    """Adjoint pair of homogeneous light-cone lifts at one family parameter.

    backend "exact": Y and Yhat are tuples of rational functions (stored
    scale: true lift = (sqrt(2)/2) * stored, pairings carry factor 1/2).
    backend "float": lifts are evaluated per sample from fresh factorizations.
    """

    __slots__ = ("backend", "m", "lam", "hf", "Y", "Yhat")

    def __init__(self, backend, m, lam, hf, Y=None, Yhat=None):
        self.backend = backend
        self.m = m
        self.lam = lam
        self.hf = hf
        self.Y = Y
        self.Yhat = Yhat

    def values(self, z):
        """Homogeneous lift values at z.

        Float backend: real vectors of the honest frame (factor included).
        Exact backend: complex vectors in the rational gauge; each differs
        from the honest lift by a sample-dependent unit scalar.
        """
        if self.backend == "float":
            return _float_lift_values(self.hf, self.lam, z)
        s = SQRT2_OVER_2
        yv = np.array([_rf_float(c, z) for c in self.Y]) * s
        hv = np.array([_rf_float(c, z) for c in self.Yhat]) * s
        return yv, hv


def extract_pair(frame: ExtendedFrame, lam) -> SurfacePair:
    """Read the adjoint pair off the frame's two middle columns."""
    if frame.hf is None:
        raise ValueError("frame carries no integrated-frame provenance")
    if frame.backend == "exact":
        lam = GaussianRational.coerce(lam)
        if lam.abs_squared() != 1:
            raise ValueError("exact family parameter must satisfy |lambda| = 1")
        mid = frame.middle.at_lambda(lam)
        m = frame.m
        col0 = [mid[i][0] for i in range(2 * m + 2)]
        col1 = [mid[i][1] for i in range(2 * m + 2)]
        minus_i = RationalFn.const(GaussianRational(0, -1))
        # Reducing here collapses the unreduced factorization denominators
        # (degrees in the tens) to the true ones, so every downstream pairing,
        # metric, and derivative works on small operands.
        Y = tuple((-c).reduced() for c in _combine(col1, m, minus_i))
        Yhat = tuple(c.reduced() for c in _combine(col0, m, minus_i))
        return SurfacePair("exact", m, lam, frame.hf, Y=Y, Yhat=Yhat)
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > 1e-12:
        raise ValueError("family parameter must lie on the unit circle")
    return SurfacePair("float", frame.m, lam, frame.hf)


def lift_columns_float(hf: HolomorphicFrame, lam: complex, z):
    """Homogeneous lift vectors before realization, as complex arrays.

    Returns (Ycol, Yhatcol) in R^{1,2m+1} coordinates including the overall
    sqrt(2)/2 scale; phase and realization are the caller's business.
    """
    m = hf.m
    w = solve_iwasawa_float(hf, z)
    Jm = np.eye(m)[::-1].astype(complex)
    fv = _eval_mat(hf.f, z)
    gv = _eval_mat(hf.g, z)
    fsh = np_sharp(fv)
    cu = w.u.conj()
    l0inv = np.linalg.inv(w.l0)
    top = (fv + gv @ Jm @ cu) @ l0inv
    mid = (np.eye(2) - fsh @ Jm @ cu) @ l0inv
    bot = (Jm @ cu) @ l0inv
    li = 1.0 / lam
    cols = np.concatenate([li * top, mid, lam * bot], axis=0)
    Ycol = -SQRT2_OVER_2 * np.array(_combine(list(cols[:, 1]), m, -1j))
    Yhatcol = SQRT2_OVER_2 * np.array(_combine(list(cols[:, 0]), m, -1j))
    return Ycol, Yhatcol


def _float_lift_values(hf: HolomorphicFrame, lam: complex, z):
    """Evaluate both honest lifts at one sample (fresh factorization)."""
    Y, Yhat = lift_columns_float(hf, lam, z)
    scale = max(1.0, float(abs(Y).max()), float(abs(Yhat).max()))
    drift = max(float(abs(Y.imag).max()), float(abs(Yhat.imag).max()))
    if drift > 1e-8 * scale:
        raise ResidualTooLarge("lift has imaginary drift %.3e at z=%r" % (drift, z))
    return Y.real, Yhat.real


def _pick(pair: SurfacePair, which: str):
    if which in ("Y", "y"):
        return pair.Y
    if which in ("Yhat", "yhat"):
        return pair.Yhat
    raise ValueError("which must be 'Y' or 'Yhat'")


def project_to_sphere(pair: SurfacePair, which: str = "Y"):
    """First-coordinate projection of a lift to the unit sphere S^{2m}.

    Exact pairs return a tuple of 2m+1 rational functions; float pairs
    return an evaluator z -> real unit vector.
    """
    if pair.backend == "exact":
        comps = _pick(pair, which)
        if comps[0].is_zero():
            raise FirstCoordinateVanishes("lift has identically zero first coordinate")
        return tuple(c / comps[0] for c in comps[1:])

    idx = 0 if which in ("Y", "y") else 1

    def at(z):
        vals = pair.values(z)[idx]
        if abs(vals[0]) < 1e-12 * max(1.0, float(abs(vals).max())):
            raise FirstCoordinateVanishes("first lift coordinate vanishes at z=%r" % (z,))
        return vals[1:] / vals[0]

    return at


def induced_metric(pair: SurfacePair, which: str = "Y", h: float = 1e-4):
    """Conformal factor |y_z|^2 of the projected surface.

    Exact pairs return it as a rational function (formal derivatives); float
    pairs return an evaluator using Richardson-extrapolated central
    differences.
    """
    if pair.backend == "exact":
        y = project_to_sphere(pair, which)
        acc = None
        for c in y:
            term = c.d_dz() * c.d_dzbar()
            acc = term if acc is None else acc + term
        return acc

    at = project_to_sphere(pair, which)

    def metric(z, step: float = h):
        def dz(s):
            yx = (at(z + s) - at(z - s)) / (2 * s)
            yy = (at(z + 1j * s) - at(z - 1j * s)) / (2 * s)
            return (yx - 1j * yy) / 2
        d = (4.0 * dz(step / 2) - dz(step)) / 3.0
        return float(np.sum(d * d.conj()).real)

    return metric


# -- total isotropy --------------------------------------------------------------


def _stencil_weights(order: int):
    """Fourth-order central weights for the order-th one-dimensional derivative."""
    table = {
        0: {0: 1.0},
        1: {-2: 1 / 12, -1: -2 / 3, 1: 2 / 3, 2: -1 / 12},
        2: {-2: -1 / 12, -1: 4 / 3, 0: -5 / 2, 1: 4 / 3, 2: -1 / 12},
        3: {-3: 1 / 8, -2: -1.0, -1: 13 / 8, 1: -13 / 8, 2: 1.0, 3: -1 / 8},
        4: {-3: -1 / 6, -2: 2.0, -1: -13 / 2, 0: 28 / 3, 1: -13 / 2, 2: 2.0,
            3: -1 / 6},
    }
    if order not in table:
        raise ValueError("stencil order %d not supported" % order)
    return table[order]


def _fd_z_derivative(values, order: int, h: float):
    """d^order/dz^order from a dict (a, b) -> vector of samples at z + (a+ib)h.

    Expands (d/dz)^j = 2^-j * sum_k C(j,k) (-i)^k d_x^{j-k} d_y^k with
    fourth-order central stencils in each axis.
    """
    acc = None
    for k in range(order + 1):
        wx = _stencil_weights(order - k)
        wy = _stencil_weights(k)
        coef = math.comb(order, k) * (-1j) ** k
        for a, ca in wx.items():
            for b, cb in wy.items():
                term = coef * ca * cb * values[(a, b)]
                acc = term if acc is None else acc + term
    return acc / (2 * h) ** order if order else acc


def _fd_derivatives(evaluate, z, max_order: int, h: float):
    """All z-derivatives of a vector map up to max_order at one sample."""
    span = 3 if max_order >= 3 else 2
    values = {}
    for a in range(-span, span + 1):
        for b in range(-span, span + 1):
            values[(a, b)] = evaluate(z + (a + 1j * b) * h)
    return [_fd_z_derivative(values, j, h) for j in range(max_order + 1)]


def isotropy_check(pair: SurfacePair, which: str = "Y", max_order: int = None,
                   samples=(), h: float = 2e-3, tol: float = None) -> dict:
    """Pairings of z-derivative pairs of a lift, up to max_order.

    All of them must vanish: the z-derivative flag of the lift is isotropic,
    a property insensitive to the stored gauge and scale.
    """
    m = pair.m
    if max_order is None:
        max_order = m
    report = {
        "which": which,
        "max_order": max_order,
        "backend": pair.backend,
        "pairs": {},
    }

    if pair.backend == "exact":
        comps = _pick(pair, which)
        derivs = [list(comps)]
        for _ in range(max_order):
            derivs.append([c.d_dz().reduced() for c in derivs[-1]])
        worst = 0.0
        for j in range(1, max_order + 1):
            for l in range(j, max_order + 1):
                p = mink_pair_rf(derivs[j], derivs[l])
                if p.is_zero():
                    res = 0.0
                else:
                    res = max(abs(_rf_float(p, z)) for z in samples) if samples else float("inf")
                report["pairs"]["(%d,%d)" % (j, l)] = res
                worst = max(worst, res)
        report["max_residual"] = worst
        return report

    idx = 0 if which in ("Y", "y") else 1
    if not samples:
        raise ValueError("float isotropy check needs sample points")

    def run(step):
        """Worst pairing per (j, l), each scaled by its own derivative norms.

        The per-pair scale measures achieved cancellation, which keeps the
        check meaningful where high derivatives dwarf the lift itself.
        """
        out = {}
        for z in samples:
            derivs = _fd_derivatives(lambda zz: pair.values(zz)[idx], z, max_order, step)
            norms = [max(1.0, float(np.linalg.norm(v))) for v in derivs]
            for j in range(1, max_order + 1):
                for l in range(j, max_order + 1):
                    val = abs(mink_pair_np(derivs[j], derivs[l])) / (norms[j] * norms[l])
                    key = "(%d,%d)" % (j, l)
                    out[key] = max(out.get(key, 0.0), float(val))
        return out

    if tol is None:
        tol = 1e-6 * (1.0 + 1e-13 / h ** max_order)

    # Truncation can dominate near poles of the lift; refine until the
    # residual stops improving or passes.
    best = run(h)
    worst = max(best.values())
    step = h
    prev = worst
    for k in (2, 4, 8):
        if worst <= tol:
            break
        finer = run(h / k)
        worst_finer = max(finer.values())
        improving = worst_finer < prev / 2
        prev = worst_finer
        if worst_finer < worst:
            best, worst, step = finer, worst_finer, h / k
        if not improving:
            break
    else:
        if worst > tol and improving:
            raise StepSizeTooCoarse(
                "isotropy residual %.3e still truncation-dominated at step %.1e;"
                " refine the step" % (worst, step)
            )
    report["pairs"] = best
    report["max_residual"] = worst
    report["step"] = step
    report["tolerance"] = tol
    return report


# -- degeneracy locus -------------------------------------------------------------


def _gram_det_float(hf: HolomorphicFrame, z: complex) -> float:
    m = hf.m
    Jm = np.eye(m)[::-1]
    J2 = np.array([[0.0, 1.0], [1.0, 0.0]])
    fv = _eval_mat(hf.f, z)
    gv = _eval_mat(hf.g, z)
    rho = np.eye(m) + Jm @ fv.conj() @ J2 @ fv.T @ Jm + gv.conj().T @ gv
    return float(np.linalg.det(rho).real)


def degeneracy_scan(source, theta: float = 0.0, r_range=(1e-3, 2.5),
                    grid_n: int = 512) -> list:
    """Radii along the ray arg z = theta where the factorization degenerates.

    The Gram determinant is a nonnegative function vanishing quadratically on
    the singular set, so its radial derivative changes sign there; each sign
    change is bisected to a bracket below 1e-10 and kept when the determinant
    is numerically zero at the located radius.
    """
    hf = _as_hf(source)
    direction = complex(math.cos(theta), math.sin(theta))
    r0, r1 = float(r_range[0]), float(r_range[1])
    if r1 <= r0 or r0 < 0:
        raise ValueError("radial range must satisfy 0 <= r0 < r1")

    def sigma(r):
        return _gram_det_float(hf, r * direction)

    fd = 1e-6

    def dsigma(r):
        return (sigma(r + fd) - sigma(max(r - fd, 0.0))) / (2 * fd)

    rs = np.linspace(r0, r1, grid_n)
    sig = np.array([sigma(r) for r in rs])
    scale = max(1.0, float(sig.max()))
    found = []
    for i in range(grid_n - 1):
        if min(sig[i], sig[i + 1]) > 1e-2 * scale:
            continue
        a, b = float(rs[i]), float(rs[i + 1])
        da, db = dsigma(a), dsigma(b)
        if da == 0.0 and db == 0.0:
            continue
        if not (da < 0.0 <= db):
            continue
        while b - a > 1e-11:
            mdl = 0.5 * (a + b)
            if dsigma(mdl) < 0.0:
                a = mdl
            else:
                b = mdl
        root = 0.5 * (a + b)
        if sigma(root) <= 1e-8 * scale:
            found.append(root)
    return found


def _as_hf(source) -> HolomorphicFrame:
    if isinstance(source, HolomorphicFrame):
        return source
    hf = getattr(source, "hf", None)
    if hf is None:
        raise ValueError("source carries no integrated-frame provenance")
    return hf


# -- behavior at infinity ----------------------------------------------------------


def _reverse_terms(p: BiPoly, dz: int, db: int) -> BiPoly:
    """Coefficient reversal: z^dz zbar^db * p(1/z, 1/zbar)."""
    return BiPoly({(dz - a, db - b): c for (a, b), c in p.terms.items()})


def _invert_coordinate(rf: RationalFn) -> RationalFn:
    """Re-express a rational function in the coordinate 1/z (and 1/zbar)."""
    ndz, ndb = rf.num.degrees()
    ddz, ddb = rf.den.degrees()
    dz, db = max(ndz, ddz), max(ndb, ddb)
    return RationalFn(_reverse_terms(rf.num, dz, db), _reverse_terms(rf.den, dz, db))


def _diagonal_limit(rf: RationalFn) -> Fraction:
    """Limit of a real-valued rational function at 0 along the diagonal z = zbar = t."""
    def diagonal(p: BiPoly):
        out = {}
        for (a, b), c in p.terms.items():
            out[a + b] = out.get(a + b, c * 0) + c
        return {k: v for k, v in out.items() if not v.is_zero()}

    num = diagonal(rf.num)
    den = diagonal(rf.den)
    if not den:
        raise ZeroDivisionError("denominator restricts to zero on the diagonal")
    if not num:
        return Fraction(0)
    on, od = min(num), min(den)
    if on > od:
        return Fraction(0)
    if on < od:
        raise ZeroDivisionError("unbounded at the puncture")
    ratio = num[on] / den[od]
    if ratio.im != 0:
        raise ValueError("diagonal limit of a real-valued function came out complex")
    return ratio.re


def branch_analysis(pair: SurfacePair) -> dict:
    """Limits of both conformal factors at z = infinity (coordinate 1/z).

    Zero limit marks a branch point of the projected surface there; a
    positive limit marks an immersed point.
    """
    if pair.backend != "exact":
        raise ExactPathRequired("behavior at infinity needs the exact components")
    out = {}
    for which, tag in (("Y", "y"), ("Yhat", "yhat")):
        y = project_to_sphere(pair, which)
        inv = [_invert_coordinate(c) for c in y]
        acc = None
        for c in inv:
            term = c.d_dz() * c.d_dzbar()
            acc = term if acc is None else acc + term
        lim = _diagonal_limit(acc)
        out["%s_limit" % tag] = lim
        out["%s_is_branch_point" % tag] = lim == 0
    return out


# -- shipped closed-form reference data ---------------------------------------------


def _r2poly(coeffs) -> BiPoly:
    """Polynomial in r^2 = z zbar from a list of rational coefficients."""
    return BiPoly({(k, k): GaussianRational(Fraction(c)) for k, c in enumerate(coeffs)
                   if Fraction(c) != 0})


def reference_lift_exact(example_id: int, lam) -> dict:
    """Closed-form homogeneous lifts of the two shipped examples, exact.

    Returns dict with keys m, Y, Yhat (tuples of rational functions, scale
    sqrt(2)/(2 sigma) omitted and signs included), sigma (the degeneracy
    polynomial in r^2), for an exact unit-circle lambda.
    """
    lam = GaussianRational.coerce(lam)
    if lam.abs_squared() != 1:
        raise ValueError("reference data needs |lambda| = 1")
    li = GR_ONE / lam

    def zc(p):
        # lam^-1 z^p - lam zbar^p and lam^-1 z^p + lam zbar^p
        zp = RationalFn(BiPoly({(p, 0): GR_ONE}))
        bp = RationalFn(BiPoly({(0, p): GR_ONE}))
        a = RationalFn.const(li) * zp
        b = RationalFn.const(lam) * bp
        return a - b, a + b

    def rp(coeffs):
        return RationalFn(_r2poly(coeffs))

    i_rf = RF_I
    if example_id == 1:
        d1, s1 = zc(1)
        d2, s2 = zc(2)
        r2 = rp([0, 1])
        Y = (
            rp([-1, -1, Fraction(-1, 4), Fraction(-1, 9)]),
            rp([1, -1, Fraction(1, 4), Fraction(1, 9)]),
            i_rf * rp([0, Fraction(1, 2)]) * d1,
            rp([0, Fraction(-1, 2)]) * s1,
            -(i_rf * d1),
            s1,
            i_rf * rp([0, Fraction(1, 3)]) * d2,
            rp([0, Fraction(-1, 3)]) * s2,
        )
        Yhat = (
            rp([1, 1, Fraction(5, 4), Fraction(4, 9), Fraction(1, 36)]),
            rp([1, -1, Fraction(-3, 4), Fraction(4, 9), Fraction(-1, 36)]),
            -(i_rf * d1) * rp([1, 0, 0, Fraction(1, 9)]),
            s1 * rp([1, 0, 0, Fraction(1, 9)]),
            i_rf * rp([0, Fraction(1, 2)]) * d1 * rp([1, Fraction(4, 3)]),
            rp([0, Fraction(-1, 2)]) * s1 * rp([1, Fraction(4, 3)]),
            -(i_rf * d2) * rp([1, 0, Fraction(-1, 12)]),
            s2 * rp([1, 0, Fraction(-1, 12)]),
        )
        sigma = _r2poly([1, 0, Fraction(-1, 4), Fraction(-2, 9)])
        return {"m": 3, "Y": Y, "Yhat": Yhat, "sigma": sigma, "sign_y": -1,
                "sign_yhat": 1}
    if example_id == 2:
        d1, s1 = zc(1)
        half = Fraction(1, 2)
        Y = (
            rp([1, 1, Fraction(1, 4)]),
            rp([-1, 1, Fraction(-1, 4)]),
            i_rf * d1,
            -s1,
            -(i_rf * rp([0, half]) * d1),
            rp([0, half]) * s1,
        )
        Yhat = (
            rp([1, 1, Fraction(1, 4)]),
            rp([1, -1, Fraction(1, 4)]),
            i_rf * rp([0, half]) * d1,
            rp([0, -half]) * s1,
            -(i_rf * d1),
            s1,
        )
        sigma = _r2poly([1, 0, Fraction(-1, 4)])
        return {"m": 2, "Y": Y, "Yhat": Yhat, "sigma": sigma, "sign_y": 1,
                "sign_yhat": 1}
    raise ValueError("no shipped example with id %r" % (example_id,))


def reference_lift_eval(example_id: int, lam: complex):
    """Float evaluator z -> (Y, Yhat) for the shipped closed forms.

    Includes the sqrt(2)/(2 sigma) scale and the printed signs, so the values
    are the honest homogeneous lifts away from the degeneracy curve.
    """
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > 1e-12:
        raise ValueError("reference data needs |lambda| = 1")
    li = 1.0 / lam

    def at(z):
        z = complex(z)
        zb = z.conjugate()
        r2 = (z * zb).real

        def d(p):
            return li * z**p - lam * zb**p

        def s(p):
            return li * z**p + lam * zb**p

        if example_id == 1:
            sigma = 1 - r2**2 / 4 - 2 * r2**3 / 9
            Y = np.array([
                -1 - r2 - r2**2 / 4 - r2**3 / 9,
                1 - r2 + r2**2 / 4 + r2**3 / 9,
                1j * (r2 / 2) * d(1),
                -(r2 / 2) * s(1),
                -1j * d(1),
                s(1),
                1j * (r2 / 3) * d(2),
                -(r2 / 3) * s(2),
            ])
            Yhat = np.array([
                1 + r2 + 5 * r2**2 / 4 + 4 * r2**3 / 9 + r2**4 / 36,
                1 - r2 - 3 * r2**2 / 4 + 4 * r2**3 / 9 - r2**4 / 36,
                -1j * d(1) * (1 + r2**3 / 9),
                s(1) * (1 + r2**3 / 9),
                1j * (r2 / 2) * d(1) * (1 + 4 * r2 / 3),
                -(r2 / 2) * s(1) * (1 + 4 * r2 / 3),
                -1j * d(2) * (1 - r2**2 / 12),
                s(2) * (1 - r2**2 / 12),
            ])
            sy, sh = -1.0, 1.0
        elif example_id == 2:
            sigma = 1 - r2**2 / 4
            Y = np.array([
                (1 + r2 / 2) ** 2,
                -((1 - r2 / 2) ** 2),
                1j * d(1),
                -s(1),
                -1j * (r2 / 2) * d(1),
                (r2 / 2) * s(1),
            ])
            Yhat = np.array([
                (1 + r2 / 2) ** 2,
                (1 - r2 / 2) ** 2,
                1j * (r2 / 2) * d(1),
                -(r2 / 2) * s(1),
                -1j * d(1),
                s(1),
            ])
            sy, sh = 1.0, 1.0
        else:
            raise ValueError("no shipped example with id %r" % (example_id,))
        if abs(sigma) < 1e-12:
            raise SingularLocus("reference lift undefined at r^2=%.6f" % r2)
        scale = SQRT2_OVER_2 / sigma
        return (sy * scale * Y).real, (sh * scale * Yhat).real

    return at


def reference_metric(example_id: int, which: str = "Y") -> RationalFn:
    """Printed conformal factors of the shipped examples, as rational functions."""
    if example_id == 1 and which in ("Y", "y"):
        num = _r2poly([2, 0, Fraction(1, 2), Fraction(8, 9)])
        den = _r2poly([1, 1, Fraction(1, 4), Fraction(1, 9)])
        return RationalFn(num, den * den)
    if example_id == 1 and which in ("Yhat", "yhat"):
        num = _r2poly([2, 8, Fraction(1, 2), Fraction(4, 9), Fraction(8, 9),
                       Fraction(1, 18), Fraction(2, 81)])
        den = _r2poly([1, 1, Fraction(5, 4), Fraction(4, 9), Fraction(1, 36)])
        return RationalFn(num, den * den)
    if example_id == 2 and which in ("Y", "y"):
        num = _r2poly([2, 0, Fraction(1, 2)])
        den = _r2poly([1, Fraction(1, 2)])
        return RationalFn(num, den * den * den * den)
    raise ValueError("no printed conformal factor for example %r, %r" % (example_id, which))


def reference_singular_radius(example_id: int) -> float:
    """Positive root of the shipped degeneracy polynomials (bisected, exact input)."""
    if example_id == 1:
        poly = [Fraction(1), Fraction(0), Fraction(0), Fraction(0),
                Fraction(-1, 4), Fraction(0), Fraction(-2, 9)]
    elif example_id == 2:
        poly = [Fraction(1), Fraction(0), Fraction(0), Fraction(0), Fraction(-1, 4)]
    else:
        raise ValueError("no shipped example with id %r" % (example_id,))

    def val(r: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(poly):
            acc = acc * r + c
        return acc

    a, b = Fraction(1), Fraction(2)
    while val(b) > 0:
        b *= 2
    for _ in range(60):
        mid = (a + b) / 2
        if val(mid) > 0:
            a = mid
        else:
            b = mid
    return float((a + b) / 2)
