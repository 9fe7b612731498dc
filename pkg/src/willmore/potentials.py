"""Normalized potentials, their nilpotent image, and potential files.

A normalized potential is determined by two length-m lists of polynomials in
z (no zbar): h and hhat.  They interleave into the 2 x 2m block

    B1hat = [[h_1, i h_1, ..., h_m, i h_m],
             [hhat_1, i hhat_1, ..., hhat_m, i hhat_m]]

whose rows are isotropic by construction (each pair contributes
h^2 + (i h)^2 = 0), and the potential matrix is the pairing

    eta_-1 = [[0, B1hat], [-B1hat^t I11, 0]]

carried at loop power -1.  Pushing through the block-graded isometry gives
the strictly upper-triangular form with the m x 2 block fcheck,
fcheck[j] = (i (h_j - hhat_j), -i (h_j + hhat_j)).

Potential files are JSON: {"m": int, "h": [[..], ..], "hhat": [[..], ..]}
where each polynomial is a list of [re, im] coefficient pairs by ascending
z power and re/im are exact rational strings "p/q" (plain numbers are also
accepted).  An optional "b1hat" key overrides the interleaved assembly with
an explicit 2 x 2m polynomial matrix; it exists so that a corrupted pairing
is expressible and the isotropy check has something real to catch.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from . import matrices as mx
from .errors import PotentialFormatError, QNotInK, StepSizeTooCoarse
from .groups import GroupContext
from .loops import LoopMatrix
from .scalars import (
    BP_ZERO,
    BiPoly,
    GR_I,
    GaussianRational,
    RationalFn,
)


def _require_z_only(p: BiPoly, what: str):
    for (_, b) in p.terms:
        if b:
            raise ValueError("%s must be a polynomial in z only" % what)


class NormalizedPotential:
    """The (h, hhat) data of a normalized potential in dimension 2m+2."""

    def __init__(self, m: int, h, hhat):
        if len(h) != m or len(hhat) != m:
            raise ValueError("expected %d polynomials in each of h, hhat" % m)
        self.m = m
        self.h = tuple(p if isinstance(p, BiPoly) else BiPoly.const(p) for p in h)
        self.hhat = tuple(p if isinstance(p, BiPoly) else BiPoly.const(p) for p in hhat)
        for j, p in enumerate(self.h):
            _require_z_only(p, "h[%d]" % j)
        for j, p in enumerate(self.hhat):
            _require_z_only(p, "hhat[%d]" % j)

    def b1hat(self):
        """The interleaved 2 x 2m block as a plain BiPoly matrix."""
        row1, row2 = [], []
        for hj, hhj in zip(self.h, self.hhat):
            row1.extend([hj, hj * GR_I])
            row2.extend([hhj, hhj * GR_I])
        return (tuple(row1), tuple(row2))

    def eta_loop(self, backend: str = "exact") -> LoopMatrix:
        """The potential matrix at loop power -1."""
        m = self.m
        d = 2 * m + 2
        B = self.b1hat()
        I11 = ((GaussianRational(-1), GaussianRational(0)),
               (GaussianRational(0), GaussianRational(1)))
        lower = mx.mat_neg(mx.mat_mul(mx.mat_transpose(B), I11))
        mat = mx.block_matrix([
            [mx.zeros(2, 2, BP_ZERO), B],
            [lower, mx.zeros(2 * m, 2 * m, BP_ZERO)],
        ])
        if backend == "exact":
            entries = mx.mat_map(mat, RationalFn.coerce)
            return LoopMatrix(d, d, {-1: entries}, "exact")
        raise ValueError("eta_loop is exact; bind with .to_float(z) as needed")

    def isotropy_residual(self):
        """B1hat B1hat^t, which vanishes identically for a valid pairing."""
        B = self.b1hat()
        return mx.mat_mul(B, mx.mat_transpose(B))


class NilpotentPotential:
    """Image of a normalized potential in the block-graded model."""

    def __init__(self, m: int, fcheck):
        self.m = m
        self.fcheck = mx.freeze(fcheck)
        r, c = mx.shape(self.fcheck)
        if (r, c) != (m, 2):
            raise ValueError("fcheck must be m x 2")

    def full_loop(self, backend: str = "exact") -> LoopMatrix:
        m = self.m
        d = 2 * m + 2
        fc = self.fcheck
        fsharp = mx.sharp(fc)
        mat = mx.block_matrix([
            [mx.zeros(m, m, BP_ZERO), fc, mx.zeros(m, m, BP_ZERO)],
            [mx.zeros(2, m, BP_ZERO), mx.zeros(2, 2, BP_ZERO), mx.mat_neg(fsharp)],
            [mx.zeros(m, m, BP_ZERO), mx.zeros(m, 2, BP_ZERO), mx.zeros(m, m, BP_ZERO)],
        ])
        if backend == "exact":
            entries = mx.mat_map(mat, RationalFn.coerce)
            return LoopMatrix(d, d, {-1: entries}, "exact")
        raise ValueError("full_loop is exact; bind with .to_float(z) as needed")


def to_nilpotent(pot: NormalizedPotential) -> NilpotentPotential:
    """Closed-form image of the potential under the block-graded isometry."""
    fc = []
    for hj, hhj in zip(pot.h, pot.hhat):
        fc.append(((hj - hhj) * GR_I, (hj + hhj) * (-GR_I)))
    return NilpotentPotential(pot.m, fc)


def conjugate_potential(eta: LoopMatrix, Q, ctx: GroupContext) -> LoopMatrix:
    """Q eta Q^-1 after checking Q lies in the potential-preserving subgroup."""
    Qm = mx.freeze(
        tuple(tuple(GaussianRational.coerce(x) for x in row) for row in Q)
    )
    d = ctx.dim
    if mx.shape(Qm) != (d, d):
        raise ValueError("Q must be %dx%d" % (d, d))
    D = ctx.D
    if not mx.mat_eq(mx.mat_mul(mx.mat_mul(D, Qm), D), Qm):
        raise QNotInK("Q does not commute with the order-two symmetry")
    G = ctx.minkowski
    if not mx.mat_eq(mx.mat_mul(mx.mat_mul(mx.mat_transpose(Qm), G), Qm), G):
        raise QNotInK("Q does not preserve the Minkowski form")
    from .scalars import GR_ONE, GR_ZERO

    Qinv = mx.gauss_inverse(Qm, GR_ONE, GR_ZERO)
    left = LoopMatrix.from_constant(Qm, eta.backend)
    right = LoopMatrix.from_constant(Qinv, eta.backend)
    return left @ eta @ right


def rank_and_classify(pot: NormalizedPotential):
    """Exact rank of B1hat plus the literal shape tag.

    Shapes are detected literally (not up to conjugation): equal rows, a
    vanishing first row, or a vanishing second row; otherwise rank 1 maps to
    the dual-pair tag and full rank to generic.
    """
    h, hh = pot.h, pot.hhat
    all_zero = all(p.is_zero() for p in h) and all(p.is_zero() for p in hh)
    if all_zero:
        rank = 0
    else:
        # Rank of the 2 x 2m B1hat equals the rank of the 2 x m matrix (h; hhat):
        # the paired columns (c, ic) are scalar multiples.  Use exact minors.
        rank = 1
        for j in range(pot.m):
            for k in range(pot.m):
                minor = h[j] * hh[k] - h[k] * hh[j]
                if not minor.is_zero():
                    rank = 2
                    break
            if rank == 2:
                break
    rows_equal = all((a - b).is_zero() for a, b in zip(h, hh))
    row1_zero = all(p.is_zero() for p in h)
    row2_zero = all(p.is_zero() for p in hh)
    if rows_equal:
        tag = "euclidean-minimal"
    elif row1_zero:
        tag = "spherical-minimal"
    elif row2_zero:
        tag = "hyperbolic-minimal"
    elif rank <= 1:
        tag = "dual-pair"
    else:
        tag = "generic"
    return rank, tag


# -- Wu-style potential from a harmonic-map framing ---------------------------


def wu_normalized_potential(delta0, delta1, z_samples, steps=None,
                            tol: float = 1e-12):
    """eta(z) = F0(z) delta1 F0(z)^-1 with F0' = F0 delta0, F0(0) = I.

    delta0 may be None/zero (then eta == delta1 everywhere), a constant
    matrix (closed form via the matrix exponential), or a callable z -> matrix
    integrated by RK4 along the segment [0, z] with step doubling.  Returns
    the loop-power -1 coefficient of eta at each sample as numpy arrays.
    """
    import numpy as np

    d1 = np.asarray(delta1, dtype=complex)
    n = d1.shape[0]
    if delta0 is None:
        return [d1.copy() for _ in z_samples]
    if not callable(delta0):
        d0 = np.asarray(delta0, dtype=complex)
        if not d0.any():
            return [d1.copy() for _ in z_samples]
        from scipy.linalg import expm

        out = []
        for z in z_samples:
            F0 = expm(z * d0)
            out.append(F0 @ d1 @ np.linalg.inv(F0))
        return out

    def integrate(z, nsteps):
        F = np.eye(n, dtype=complex)
        hstep = z / nsteps
        t = 0j
        for _ in range(nsteps):
            k1 = F @ delta0(t)
            k2 = (F + 0.5 * hstep * k1) @ delta0(t + 0.5 * hstep)
            k3 = (F + 0.5 * hstep * k2) @ delta0(t + 0.5 * hstep)
            k4 = (F + hstep * k3) @ delta0(t + hstep)
            F = F + (hstep / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            t += hstep
        return F

    out = []
    for z in z_samples:
        if z == 0:
            out.append(d1.copy())
            continue
        if steps is not None:
            coarse = integrate(z, steps)
            fine = integrate(z, 2 * steps)
            scale = max(1.0, float(abs(fine).max()))
            if float(abs(fine - coarse).max()) > tol * scale:
                raise StepSizeTooCoarse(
                    "step doubling disagrees at z=%r with %d steps" % (z, steps)
                )
            F0 = fine
        else:
            nsteps = 64
            F0 = None
            coarse = integrate(z, nsteps)
            while nsteps <= 1 << 14:
                fine = integrate(z, 2 * nsteps)
                scale = max(1.0, float(abs(fine).max()))
                if float(abs(fine - coarse).max()) <= tol * scale:
                    F0 = fine
                    break
                coarse = fine
                nsteps *= 2
            if F0 is None:
                raise StepSizeTooCoarse(
                    "no convergence at z=%r within %d steps" % (z, nsteps)
                )
        out.append(F0 @ d1 @ np.linalg.inv(F0))
    return out


# -- potential files ----------------------------------------------------------


def _frac_to_str(f: Fraction) -> str:
    return str(f)


def _coeff_to_pair(c: GaussianRational):
    return [_frac_to_str(c.re), _frac_to_str(c.im)]


def _poly_to_pairs(p: BiPoly):
    _require_z_only(p, "potential entry")
    deg = max((a for (a, _) in p.terms), default=0)
    out = []
    for k in range(deg + 1):
        c = p.terms.get((k, 0), None)
        out.append(_coeff_to_pair(c) if c is not None else ["0", "0"])
    return out

def _parse_rational(x, where: str) -> Fraction:
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as e:
            raise PotentialFormatError("bad rational %r in %s: %s" % (x, where, e))
    if isinstance(x, bool):
        raise PotentialFormatError("boolean is not a number in %s" % where)
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise PotentialFormatError("expected rational string or number in %s" % where)


def _parse_poly(entry, where: str) -> BiPoly:
    if not isinstance(entry, list):
        raise PotentialFormatError("%s must be a list of [re, im] pairs" % where)
    terms = {}
    for k, pair in enumerate(entry):
        if not isinstance(pair, list) or len(pair) != 2:
            raise PotentialFormatError(
                "%s coefficient %d must be a [re, im] pair" % (where, k)
            )
        re = _parse_rational(pair[0], "%s[%d].re" % (where, k))
        im = _parse_rational(pair[1], "%s[%d].im" % (where, k))
        c = GaussianRational(re, im)
        if not c.is_zero():
            terms[(k, 0)] = c
    return BiPoly(terms)


class PotentialDocument:
    """Parsed potential file: the pairing data plus the effective B1hat."""

    def __init__(self, m: int, h, hhat, b1hat_override=None, source=None):
        self.m = m
        self.h = tuple(h)
        self.hhat = tuple(hhat)
        self.b1hat_override = b1hat_override
        self.source = source if source is not None else self.to_dict()

    def b1hat(self):
        if self.b1hat_override is not None:
            return self.b1hat_override
        return NormalizedPotential(self.m, self.h, self.hhat).b1hat()

    def pairing_consistent(self) -> bool:
        if self.b1hat_override is None:
            return True
        want = NormalizedPotential(self.m, self.h, self.hhat).b1hat()
        return mx.mat_eq(self.b1hat_override, want)

    def normalized(self) -> NormalizedPotential:
        if not self.pairing_consistent():
            raise PotentialFormatError(
                "b1hat override breaks the h/hhat pairing; refusing to synthesize"
            )
        return NormalizedPotential(self.m, self.h, self.hhat)

    def to_dict(self) -> dict:
        out = {
            "m": self.m,
            "h": [_poly_to_pairs(p) for p in self.h],
            "hhat": [_poly_to_pairs(p) for p in self.hhat],
        }
        if self.b1hat_override is not None:
            out["b1hat"] = [
                [_poly_to_pairs(p) for p in row] for row in self.b1hat_override
            ]
        return out

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def parse_potential(data) -> PotentialDocument:
    if not isinstance(data, dict):
        raise PotentialFormatError("potential document must be a JSON object")
    try:
        m = data["m"]
    except KeyError:
        raise PotentialFormatError("missing key 'm'")
    if not isinstance(m, int) or m < 1:
        raise PotentialFormatError("'m' must be a positive integer")
    for key in ("h", "hhat"):
        if key not in data:
            raise PotentialFormatError("missing key %r" % key)
        if not isinstance(data[key], list) or len(data[key]) != m:
            raise PotentialFormatError("%r must list %d polynomials" % (key, m))
    h = [_parse_poly(e, "h[%d]" % j) for j, e in enumerate(data["h"])]
    hhat = [_parse_poly(e, "hhat[%d]" % j) for j, e in enumerate(data["hhat"])]
    override = None
    if "b1hat" in data:
        rows = data["b1hat"]
        if not isinstance(rows, list) or len(rows) != 2:
            raise PotentialFormatError("'b1hat' must have exactly 2 rows")
        parsed = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != 2 * m:
                raise PotentialFormatError(
                    "'b1hat' row %d must list %d polynomials" % (i, 2 * m)
                )
            parsed.append(
                tuple(
                    _parse_poly(e, "b1hat[%d][%d]" % (i, j))
                    for j, e in enumerate(row)
                )
            )
        override = tuple(parsed)
    return PotentialDocument(m, h, hhat, override, source=data)


def load_potential(path) -> PotentialDocument:
    with open(path, "r") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise PotentialFormatError(e.msg, line=e.lineno, column=e.colno)
    return parse_potential(data)


def save_potential(doc: PotentialDocument, path):
    with open(path, "w") as fh:
        json.dump(doc.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def builtin_potential(example_id: int) -> NormalizedPotential:
    """The two closed-form reference potentials."""
    i = GR_I
    half_i = GaussianRational(0, Fraction(1, 2))
    z = BiPoly.var_z()
    if example_id == 1:
        h = [BiPoly.const(-half_i), BiPoly.const(half_i), z * (-i)]
        hhat = [BiPoly.const(half_i), BiPoly.const(half_i), z * i]
        return NormalizedPotential(3, h, hhat)
    if example_id == 2:
        h = [BiPoly.const(half_i), BiPoly.const(-half_i)]
        hhat = [BiPoly.const(half_i), BiPoly.const(half_i)]
        return NormalizedPotential(2, h, hhat)
    raise ValueError("example_id must be 1 or 2")


def document_for(pot: NormalizedPotential) -> PotentialDocument:
    return PotentialDocument(pot.m, pot.h, pot.hhat)
