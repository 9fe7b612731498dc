"""Explicit loop-group factorization for nilpotent integrated frames.

For frames H = I + loop^-1 (f, -f#) + loop^-2 (g) the factorization
H = F~ W^-1 is solved in closed form.  The Gram data comes from six block
equations, solved in the order 1F (rho), 1E (u#), 1C (q), 1D (v), 1A (a),
with 1B kept as a residual:

    1F: rho = I + Jm fbar J2 f^t Jm + gbar^t g
    1E: u# rho = f# - J2 fbar^t g
    1C: q = I + J2 fbar^t f - u# rho u#bar^t J2
    1D: v rho = g
    1A: a = I - u q J2 ubar^t - v rho vbar^t
    1B: u q - v rho u#bar^t J2 = f        (residual)

The diagonal Gram factor W0 = diag(a, q, rho) splits as tau(L)^-1 L with
L = diag(l1, l0, l4): l4 is the upper Cholesky factor of rho, l0 the
principal square root of the unit diagonal q, and l1 = Jm (l4^t)^-1 Jm,
which satisfies the bilinear pairing exactly and the Hermitian condition
l1bar^t l1 = a as a theorem (checked, not assumed).

l1 and l4 live outside the rational-function field (square roots), so the
exact backend carries the witness only; the full extended frame is a float
object per sample.  When q == I2 identically the frame's middle two columns
are rational and are assembled exactly; they are all the surface extraction
needs.
"""

from __future__ import annotations

import numpy as np

from . import matrices as mx
from .errors import ResidualTooLarge, SingularLocus
from .frames import HolomorphicFrame
from .loops import LoopMatrix
from .scalars import (
    BP_ZERO,
    BiPoly,
    GR_ONE,
    GR_ZERO,
    GaussianRational,
    RF_ONE,
    RF_ZERO,
    RationalFn,
)

_STRUCT_TOL = 1e-8


def np_sharp(X: np.ndarray) -> np.ndarray:
    p, q = X.shape
    if p != 2 and q != 2:
        raise ValueError("sharp requires a 2-row or 2-column matrix")
    return X[::-1, ::-1].T


class IwasawaWitness:
    """Gram data of the factorization, exact (global) or float (per sample)."""

    def __init__(self, backend, m, rho, rho_inv, det_rho, u, usharp, v, q, a,
                 l0=None, l1=None, l4=None, q_is_identity=None, z=None,
                 residuals=None):
        self.backend = backend
        self.m = m
        self.rho = rho
        self.rho_inv = rho_inv
        self.det_rho = det_rho
        self.u = u
        self.usharp = usharp
        self.v = v
        self.q = q
        self.a = a
        self.l0 = l0
        self.l1 = l1
        self.l4 = l4
        self.q_is_identity = q_is_identity
        self.z = z
        self.residuals = residuals or {}


class ExtendedFrame:
    """Factorized frame: full float loop at a sample, or exact middle columns."""

    def __init__(self, backend, m, witness, F=None, middle=None, z=None,
                 factor_residual=None, hf=None):
        self.backend = backend
        self.m = m
        self.witness = witness
        self.F = F
        self.middle = middle
        self.z = z
        self.factor_residual = factor_residual
        self.hf = hf


def _jm(m):
    return tuple(
        tuple(GR_ONE if i + j == m - 1 else GR_ZERO for j in range(m))
        for i in range(m)
    )


def _j2():
    return ((GR_ZERO, GR_ONE), (GR_ONE, GR_ZERO))


def solve_iwasawa(hf: HolomorphicFrame, z=None, backend: str = "exact",
                  tol: float = _STRUCT_TOL) -> IwasawaWitness:
    if backend == "exact":
        return solve_iwasawa_exact(hf)
    if backend == "float":
        if z is None:
            raise ValueError("float backend needs a sample point z")
        return solve_iwasawa_float(hf, z, tol=tol)
    raise ValueError("backend must be 'exact' or 'float'")


def solve_iwasawa_exact(hf: HolomorphicFrame) -> IwasawaWitness:
    """Global rational-function witness (no square roots taken)."""
    m = hf.m
    Jm = _jm(m)
    J2 = _j2()
    f = hf.f
    g = hf.g
    fbar = mx.mat_conj(f)
    gbar = mx.mat_conj(g)
    fsharp = mx.sharp(f)

    # 1F
    gram = mx.mat_mul(mx.mat_mul(Jm, fbar), mx.mat_mul(J2, mx.mat_mul(mx.mat_transpose(f), Jm)))
    rho_poly = mx.mat_add(
        mx.identity(m, BiPoly.const(1), BP_ZERO),
        mx.mat_add(gram, mx.mat_mul(mx.mat_transpose(gbar), g)),
    )
    if m == 1:
        det = rho_poly[0][0]
        adj = ((BiPoly.const(1),),)
    else:
        det = mx.det_small(rho_poly)
        adj = mx.adjugate_small(rho_poly)
    det_rf = RationalFn(det)
    rho_inv = mx.mat_map(adj, lambda p: RationalFn(p, det))
    rho = mx.mat_map(rho_poly, RationalFn.coerce)

    # 1E
    num_us = mx.mat_sub(
        mx.mat_map(fsharp, RationalFn.coerce),
        mx.mat_map(
            mx.mat_mul(mx.mat_mul(J2, mx.mat_transpose(fbar)), g), RationalFn.coerce
        ),
    )
    usharp = mx.mat_mul(num_us, rho_inv)
    u = mx.sharp(usharp)

    # 1C
    usharp_bar_t = mx.mat_transpose(mx.mat_conj(usharp))
    q = mx.mat_sub(
        mx.mat_add(
            mx.identity(2, RF_ONE, RF_ZERO),
            mx.mat_map(
                mx.mat_mul(mx.mat_mul(J2, mx.mat_transpose(fbar)), f),
                RationalFn.coerce,
            ),
        ),
        mx.mat_mul(mx.mat_mul(usharp, rho), mx.mat_mul(usharp_bar_t, mx.mat_map(J2, RationalFn.coerce))),
    )

    # 1D
    v = mx.mat_mul(mx.mat_map(g, RationalFn.coerce), rho_inv)

    # 1A
    ubar_t = mx.mat_transpose(mx.mat_conj(u))
    vbar_t = mx.mat_transpose(mx.mat_conj(v))
    J2rf = mx.mat_map(J2, RationalFn.coerce)
    a = mx.mat_sub(
        mx.mat_sub(
            mx.identity(m, RF_ONE, RF_ZERO),
            mx.mat_mul(mx.mat_mul(u, q), mx.mat_mul(J2rf, ubar_t)),
        ),
        mx.mat_mul(mx.mat_mul(v, rho), vbar_t),
    )

    # 1B residual must vanish identically.
    resid = mx.mat_sub(
        mx.mat_sub(
            mx.mat_mul(u, q),
            mx.mat_mul(mx.mat_mul(v, rho), mx.mat_mul(usharp_bar_t, J2rf)),
        ),
        mx.mat_map(f, RationalFn.coerce),
    )
    if not mx.mat_is_zero(resid):
        raise ResidualTooLarge("closure equation 1B fails as a rational identity")

    q_is_identity = mx.mat_eq(q, mx.identity(2, RF_ONE, RF_ZERO))
    l0 = mx.identity(2, RF_ONE, RF_ZERO) if q_is_identity else None
    return IwasawaWitness(
        "exact", m, rho, rho_inv, det_rf, u, usharp, v, q, a,
        l0=l0, q_is_identity=q_is_identity,
    )


def _eval_mat(mat, z) -> np.ndarray:
    return np.array(
        [[p.evaluate_float(z) if isinstance(p, BiPoly) else p.evaluate(z)
          for p in row] for row in mat],
        dtype=complex,
    )


def solve_iwasawa_float(hf: HolomorphicFrame, z, tol: float = _STRUCT_TOL) -> IwasawaWitness:
    """Per-sample numeric witness including the triangular factors."""
    m = hf.m
    z = complex(z)
    Jm = np.eye(m)[::-1].astype(complex)
    J2 = np.array([[0, 1], [1, 0]], dtype=complex)
    fv = _eval_mat(hf.f, z)
    gv = _eval_mat(hf.g, z)
    fsh = np_sharp(fv)

    rho = np.eye(m, dtype=complex) + Jm @ fv.conj() @ J2 @ fv.T @ Jm + gv.conj().T @ gv
    scale = max(1.0, float(abs(rho).max()))
    eigs = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if eigs.min() <= 1e-12 * scale:
        raise SingularLocus(
            "gram matrix lost positivity at z=%r (min eig %.3e)" % (z, eigs.min())
        )
    rho_inv = np.linalg.inv(rho)
    det_rho = float(np.linalg.det(rho).real)

    usharp = (fsh - J2 @ fv.conj().T @ gv) @ rho_inv
    u = np_sharp(usharp)
    q = np.eye(2, dtype=complex) + J2 @ fv.conj().T @ fv \
        - usharp @ rho @ usharp.conj().T @ J2
    v = gv @ rho_inv
    a = np.eye(m, dtype=complex) - u @ q @ J2 @ u.conj().T - v @ rho @ v.conj().T

    residuals = {}
    residuals["1B"] = float(
        abs(u @ q - v @ rho @ usharp.conj().T @ J2 - fv).max()
    )
    qscale = max(1.0, float(abs(q).max()))
    offdiag = max(abs(q[0, 1]), abs(q[1, 0]))
    c = q[0, 0]
    residuals["q-offdiag"] = float(offdiag)
    residuals["q-unit"] = float(abs(abs(c) - 1.0))
    residuals["q-conj-pair"] = float(abs(q[1, 1] - c.conjugate()))
    if offdiag > tol * qscale or abs(abs(c) - 1.0) > tol:
        raise SingularLocus(
            "block q is not a unit diagonal at z=%r (offdiag %.3e, |c|-1 %.3e)"
            % (z, offdiag, abs(abs(c) - 1.0))
        )
    s = np.sqrt(c)
    l0 = np.diag([s, 1.0 / s])

    try:
        Lc = np.linalg.cholesky(rho)
    except np.linalg.LinAlgError:
        raise SingularLocus("cholesky failed at z=%r" % (z,))
    l4 = Lc.conj().T
    l1 = Jm @ np.linalg.inv(l4.T) @ Jm
    residuals["a-factor"] = float(abs(l1.conj().T @ l1 - a).max())
    residuals["rho-factor"] = float(abs(l4.conj().T @ l4 - rho).max())
    residuals["1B-scaled"] = residuals["1B"] / max(1.0, float(abs(fv).max()))
    if residuals["1B"] > 1e-6 * max(1.0, float(abs(fv).max())):
        raise ResidualTooLarge("closure equation 1B residual %.3e" % residuals["1B"])
    if residuals["a-factor"] > 1e-6 * max(1.0, float(abs(a).max())):
        raise ResidualTooLarge(
            "triangular factor mismatch %.3e against block a" % residuals["a-factor"]
        )

    return IwasawaWitness(
        "float", m, rho, rho_inv, det_rho, u, usharp, v, q, a,
        l0=l0, l1=l1, l4=l4,
        q_is_identity=bool(offdiag <= tol and abs(c - 1.0) <= tol),
        z=z, residuals=residuals,
    )


def assemble_frame(hf: HolomorphicFrame, witness: IwasawaWitness,
                   check: bool = True) -> ExtendedFrame:
    """Build the factorized frame from a witness."""
    if witness.backend == "float":
        return _assemble_float(hf, witness, check)
    return _assemble_exact_middle(hf, witness)


def _assemble_float(hf: HolomorphicFrame, w: IwasawaWitness, check: bool) -> ExtendedFrame:
    m = hf.m
    d = 2 * m + 2
    z = w.z
    Jm = np.eye(m)[::-1].astype(complex)
    J2 = np.array([[0, 1], [1, 0]], dtype=complex)
    fv = _eval_mat(hf.f, z)
    gv = _eval_mat(hf.g, z)
    fsh = np_sharp(fv)
    cu_sharp = w.usharp.conj()
    cu = w.u.conj()
    cv = w.v.conj()
    l0inv = np.linalg.inv(w.l0)
    l1inv = np.linalg.inv(w.l1)
    l4inv = np.linalg.inv(w.l4)

    blocks = {}

    def put(power, r0, c0, mat):
        blk = blocks.setdefault(power, np.zeros((d, d), dtype=complex))
        blk[r0:r0 + mat.shape[0], c0:c0 + mat.shape[1]] = mat

    put(0, 0, 0, (np.eye(m) - fv @ cu_sharp @ Jm + gv @ Jm @ cv @ Jm) @ l1inv)
    put(-1, 0, m, (fv + gv @ Jm @ cu) @ l0inv)
    put(-2, 0, m + 2, gv @ l4inv)
    put(1, m, 0, -(cu_sharp @ Jm + fsh @ Jm @ cv @ Jm) @ l1inv)
    put(0, m, m, (np.eye(2) - fsh @ Jm @ cu) @ l0inv)
    put(-1, m, m + 2, -fsh @ l4inv)
    put(2, m + 2, 0, Jm @ cv @ Jm @ l1inv)
    put(1, m + 2, m, Jm @ cu @ l0inv)
    put(0, m + 2, m + 2, l4inv)

    F = LoopMatrix(d, d, {k: tuple(map(tuple, b)) for k, b in blocks.items()}, "float")

    factor_residual = None
    if check:
        from .groups import get_context
        from .loops import unipotent_inverse

        ctx = get_context(m)
        L = np.zeros((d, d), dtype=complex)
        L[0:m, 0:m] = w.l1
        L[m:m + 2, m:m + 2] = w.l0
        L[m + 2:, m + 2:] = w.l4
        L_loop = LoopMatrix.from_constant(L, "float")
        # W = I + loop^-1 (u at (1,2), -u# at (2,3)) + loop^-2 (v at (1,3)).
        wp1 = np.zeros((d, d), dtype=complex)
        wp1[0:m, m:m + 2] = w.u
        wp1[m:m + 2, m + 2:] = -w.usharp
        wp2 = np.zeros((d, d), dtype=complex)
        wp2[0:m, m + 2:] = w.v
        W_loop = LoopMatrix.identity(d, "float") + LoopMatrix(
            d, d, {-1: tuple(map(tuple, wp1)), -2: tuple(map(tuple, wp2))}, "float"
        )
        tauW = ctx.tau(W_loop)
        tauWinv = unipotent_inverse(tauW)
        H_float = hf.H_loop().to_float(z)
        factor_residual = (F @ L_loop @ tauWinv - H_float).max_abs()
        if factor_residual > 1e-6:
            raise ResidualTooLarge(
                "frame does not refactor the holomorphic side: %.3e" % factor_residual
            )

    return ExtendedFrame("float", m, w, F=F, z=z, factor_residual=factor_residual,
                         hf=hf)


def _assemble_exact_middle(hf: HolomorphicFrame, w: IwasawaWitness) -> ExtendedFrame:
    """Exact middle two columns; valid in any gauge of the unit block l0.

    The assembled columns omit the l0^-1 factor (the 'rational gauge').  When
    q == I2 identically this is the honest frame; otherwise the columns differ
    from it by the unit scalars (s, sbar) column-wise, which every projective
    and quadratic check is insensitive to.
    """
    m = hf.m
    d = 2 * m + 2
    Jm = mx.mat_map(_jm(m), RationalFn.coerce)
    f = mx.mat_map(hf.f, RationalFn.coerce)
    g = mx.mat_map(hf.g, RationalFn.coerce)
    fsharp = mx.mat_map(mx.sharp(hf.f), RationalFn.coerce)
    ubar = mx.mat_conj(w.u)
    top = mx.mat_add(f, mx.mat_mul(mx.mat_mul(g, Jm), ubar))
    mid = mx.mat_sub(
        mx.identity(2, RF_ONE, RF_ZERO),
        mx.mat_mul(mx.mat_mul(fsharp, Jm), ubar),
    )
    bot = mx.mat_mul(Jm, ubar)

    zero = RF_ZERO
    rows_m1 = [[zero] * 2 for _ in range(d)]
    rows_0 = [[zero] * 2 for _ in range(d)]
    rows_p1 = [[zero] * 2 for _ in range(d)]
    for i in range(m):
        rows_m1[i][0] = top[i][0]
        rows_m1[i][1] = top[i][1]
    for i in range(2):
        rows_0[m + i][0] = mid[i][0]
        rows_0[m + i][1] = mid[i][1]
    for i in range(m):
        rows_p1[m + 2 + i][0] = bot[i][0]
        rows_p1[m + 2 + i][1] = bot[i][1]
    middle = LoopMatrix(
        d, 2,
        {-1: mx.freeze(rows_m1), 0: mx.freeze(rows_0), 1: mx.freeze(rows_p1)},
        "exact",
    )
    return ExtendedFrame("exact", m, w, middle=middle, hf=hf)


# -- connection forms ----------------------------------------------------------


def maurer_cartan(hf: HolomorphicFrame, z, h: float = 1e-4):
    """Closed-form connection coefficients at a sample (float path).

    Returns (alpha1p, alpha0p): the loop^-1 coefficient L N L^-1 (N the
    nilpotent potential value) and the loop^0 coefficient
    L [N, tauW1] L^-1 - L_z L^-1, with L_z from fourth-order central
    differences of the per-sample triangular factors.
    """
    m = hf.m
    d = 2 * m + 2
    Jm = np.eye(m)[::-1].astype(complex)

    def L_at(zz):
        w = solve_iwasawa_float(hf, zz)
        L = np.zeros((d, d), dtype=complex)
        L[0:m, 0:m] = w.l1
        L[m:m + 2, m:m + 2] = w.l0
        L[m + 2:, m + 2:] = w.l4
        return L, w

    L, w = L_at(z)
    Linv = np.linalg.inv(L)
    fcv = _eval_mat(hf.fcheck, z)
    N = np.zeros((d, d), dtype=complex)
    N[0:m, m:m + 2] = fcv
    N[m:m + 2, m + 2:] = -np_sharp(fcv)
    alpha1p = L @ N @ Linv

    tauW1 = np.zeros((d, d), dtype=complex)
    tauW1[m:m + 2, 0:m] = -w.usharp.conj() @ Jm
    tauW1[m + 2:, m:m + 2] = Jm @ w.u.conj()
    commutator = N @ tauW1 - tauW1 @ N

    def axis_diff(step):
        a2, _ = L_at(z + 2 * step)
        a1, _ = L_at(z + step)
        b1, _ = L_at(z - step)
        b2, _ = L_at(z - 2 * step)
        return (-a2 + 8 * a1 - 8 * b1 + b2) / (12 * h)

    Lz = (axis_diff(h) - 1j * axis_diff(1j * h)) / 2
    alpha0p = L @ commutator @ Linv - Lz @ Linv
    return alpha1p, alpha0p


def pullback_halfisotropy(ctx, alpha1p: np.ndarray) -> dict:
    """Pull the loop^-1 coefficient back and test the isotropy bilinear.

    The pullback must land in the off-diagonal part with top-right block B1
    satisfying B1 B1^t = 0; the report carries both residuals.
    """
    m = ctx.m
    d = ctx.dim
    pulled = ctx.iso_P_inv_np(alpha1p)
    B1 = pulled[0:2, 2:d]
    diag_contamination = max(
        float(abs(pulled[0:2, 0:2]).max()),
        float(abs(pulled[2:, 2:]).max()),
    )
    iso = float(abs(B1 @ B1.T).max())
    lower = pulled[2:, 0:2]
    I11 = np.diag([-1.0, 1.0]).astype(complex)
    pairing = float(abs(lower + B1.T @ I11).max())
    return {
        "b1_isotropy": iso,
        "offblock_residual": diag_contamination,
        "pairing_residual": pairing,
    }
