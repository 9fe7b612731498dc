"""Laurent-polynomial loops with matrix coefficients.

A LoopMatrix is a finite Laurent polynomial in the loop parameter, stored
power-major: {power: coefficient matrix}.  Coefficient matrices are tuples of
tuples over one of two scalar backends:

* 'exact': RationalFn entries (functions of z, zbar);
* 'float': complex entries (the loop bound at one sample point).

The conjugation bar() implements the loop-group reality operator on
coefficients: conjugate each entry, negate each power.  At a physical sample
(zbar = conj z) this agrees with the functional conjugate, which is why the
float backend supports it entrywise.
"""

from __future__ import annotations

from fractions import Fraction

from . import matrices as mx
from .errors import LambdaZero
from .scalars import GR_ONE, GaussianRational, RationalFn, RF_ZERO, RF_ONE

_FLOAT_TYPES = (complex, float, int)


def backend_zero(backend):
    return RF_ZERO if backend == "exact" else 0j


def backend_one(backend):
    return RF_ONE if backend == "exact" else (1 + 0j)


def coerce_scalar(x, backend):
    if backend == "exact":
        if isinstance(x, RationalFn):
            return x
        return RationalFn.coerce(x)
    if isinstance(x, _FLOAT_TYPES):
        return complex(x)
    if isinstance(x, GaussianRational):
        return x.to_complex()
    raise TypeError("cannot coerce %r into float backend" % (x,))


class LaurentScalar:
    """Finite Laurent polynomial with scalar coefficients."""

    __slots__ = ("coeffs", "backend")

    def __init__(self, coeffs, backend):
        clean = {}
        for k, v in coeffs.items():
            v = coerce_scalar(v, backend)
            if not mx.sc_is_zero(v):
                clean[int(k)] = v
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "backend", backend)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentScalar is immutable")

    @classmethod
    def const(cls, value, backend):
        return cls({0: value}, backend)

    def _check(self, other):
        if self.backend != other.backend:
            raise ValueError("mixed LaurentScalar backends")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, backend_zero(self.backend)) + v
        return LaurentScalar(out, self.backend)

    def __neg__(self):
        return LaurentScalar({k: -v for k, v in self.coeffs.items()}, self.backend)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        out = {}
        zero = backend_zero(self.backend)
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                k = k1 + k2
                out[k] = out.get(k, zero) + v1 * v2
        return LaurentScalar(out, self.backend)

    def scale(self, s):
        s = coerce_scalar(s, self.backend)
        return LaurentScalar({k: v * s for k, v in self.coeffs.items()}, self.backend)

    def shift(self, dk: int):
        return LaurentScalar({k + dk: v for k, v in self.coeffs.items()}, self.backend)

    def bar(self):
        return LaurentScalar(
            {-k: v.conjugate() for k, v in self.coeffs.items()}, self.backend
        )

    def d_dz(self):
        if self.backend != "exact":
            raise ValueError("d_dz requires the exact backend")
        return LaurentScalar({k: v.d_dz() for k, v in self.coeffs.items()}, "exact")

    def d_dzbar(self):
        if self.backend != "exact":
            raise ValueError("d_dzbar requires the exact backend")
        return LaurentScalar({k: v.d_dzbar() for k, v in self.coeffs.items()}, "exact")

    def window(self):
        if not self.coeffs:
            return (0, 0)
        return (min(self.coeffs), max(self.coeffs))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, LaurentScalar):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("LaurentScalar is unhashable")

    def at_lambda(self, lam):
        """Collapse the loop parameter to an exact unit value; stays exact."""
        if self.backend == "exact":
            lam = GaussianRational.coerce(lam)
            acc = RF_ZERO
            for k, v in self.coeffs.items():
                if k >= 0:
                    p = _gr_pow(lam, k)
                else:
                    p = GR_ONE / _gr_pow(lam, -k)
                acc = acc + v * RationalFn.const(p)
            return acc
        acc = 0j
        lam = complex(lam)
        for k, v in self.coeffs.items():
            acc += v * lam**k
        return acc

    def evaluate(self, z, lam) -> complex:
        """Numeric value; z is ignored on the float backend."""
        lam = complex(lam)
        if lam == 0 and any(k < 0 for k in self.coeffs):
            raise LambdaZero("negative loop powers evaluated at lambda = 0")
        acc = 0j
        for k, v in self.coeffs.items():
            base = v.evaluate(z) if self.backend == "exact" else v
            acc += base * lam**k
        return acc

    def __repr__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for k in sorted(self.coeffs):
            bits.append("[t^%d] %r" % (k, self.coeffs[k]))
        return " + ".join(bits)


def _gr_pow(base: GaussianRational, n: int) -> GaussianRational:
    acc = GR_ONE
    for _ in range(n):
        acc = acc * base
    return acc


class LoopMatrix:
    """Matrix-valued finite Laurent polynomial, power-major storage."""

    __slots__ = ("rows", "cols", "coeffs", "backend")

    def __init__(self, rows, cols, coeffs, backend):
        clean = {}
        for k, mat in coeffs.items():
            mat = mx.freeze(mat)
            if mx.shape(mat) != (rows, cols):
                raise ValueError(
                    "coefficient at power %d has shape %s, expected %dx%d"
                    % (k, mx.shape(mat), rows, cols)
                )
            if not mx.mat_is_zero(mat):
                clean[int(k)] = mat
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "backend", backend)

    def __setattr__(self, name, value):
        raise AttributeError("LoopMatrix is immutable")

    @classmethod
    def from_constant(cls, mat, backend, power=0):
        mat = mx.freeze(
            tuple(tuple(coerce_scalar(x, backend) for x in row) for row in mat)
        )
        r, c = mx.shape(mat)
        return cls(r, c, {power: mat}, backend)

    @classmethod
    def identity(cls, n, backend):
        one = backend_one(backend)
        zero = backend_zero(backend)
        return cls(n, n, {0: mx.identity(n, one, zero)}, backend)

    @classmethod
    def zero(cls, rows, cols, backend):
        return cls(rows, cols, {}, backend)

    def _check(self, other):
        if self.backend != other.backend:
            raise ValueError("mixed LoopMatrix backends")

    def __add__(self, other):
        self._check(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("LoopMatrix shape mismatch in add")
        out = dict(self.coeffs)
        for k, mat in other.coeffs.items():
            out[k] = mx.mat_add(out[k], mat) if k in out else mat
        return LoopMatrix(self.rows, self.cols, out, self.backend)

    def __neg__(self):
        return LoopMatrix(
            self.rows, self.cols,
            {k: mx.mat_neg(m) for k, m in self.coeffs.items()}, self.backend,
        )

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other):
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(
                "LoopMatrix matmul mismatch: %dx%d @ %dx%d"
                % (self.rows, self.cols, other.rows, other.cols)
            )
        out = {}
        for k1, m1 in self.coeffs.items():
            for k2, m2 in other.coeffs.items():
                k = k1 + k2
                prod = mx.mat_mul(m1, m2)
                out[k] = mx.mat_add(out[k], prod) if k in out else prod
        return LoopMatrix(self.rows, other.cols, out, self.backend)

    def scale(self, s):
        s = coerce_scalar(s, self.backend)
        return LoopMatrix(
            self.rows, self.cols,
            {k: mx.mat_scale(m, s) for k, m in self.coeffs.items()}, self.backend,
        )

    def shift_power(self, dk: int):
        return LoopMatrix(
            self.rows, self.cols,
            {k + dk: m for k, m in self.coeffs.items()}, self.backend,
        )

    def transpose(self):
        return LoopMatrix(
            self.cols, self.rows,
            {k: mx.mat_transpose(m) for k, m in self.coeffs.items()}, self.backend,
        )

    def bar(self):
        """Loop reality operator: conjugate entries, negate powers."""
        return LoopMatrix(
            self.rows, self.cols,
            {-k: mx.mat_conj(m) for k, m in self.coeffs.items()}, self.backend,
        )

    def conj_transpose(self):
        return self.bar().transpose()

    def negate_lambda(self):
        """Substitute lambda -> -lambda: odd powers flip sign."""
        out = {}
        for k, m in self.coeffs.items():
            out[k] = mx.mat_neg(m) if k % 2 else m
        return LoopMatrix(self.rows, self.cols, out, self.backend)

    def entry(self, i: int, j: int) -> LaurentScalar:
        return LaurentScalar(
            {k: m[i][j] for k, m in self.coeffs.items()}, self.backend
        )

    def power(self, k: int):
        zero = backend_zero(self.backend)
        return self.coeffs.get(k, mx.zeros(self.rows, self.cols, zero))

    def window(self):
        if not self.coeffs:
            return (0, 0)
        return (min(self.coeffs), max(self.coeffs))

    def d_dz(self):
        if self.backend != "exact":
            raise ValueError("d_dz requires the exact backend")
        return LoopMatrix(
            self.rows, self.cols,
            {k: mx.mat_map(m, lambda x: x.d_dz()) for k, m in self.coeffs.items()},
            "exact",
        )

    def d_dzbar(self):
        if self.backend != "exact":
            raise ValueError("d_dzbar requires the exact backend")
        return LoopMatrix(
            self.rows, self.cols,
            {k: mx.mat_map(m, lambda x: x.d_dzbar()) for k, m in self.coeffs.items()},
            "exact",
        )

    def map_entries(self, fn):
        return LoopMatrix(
            self.rows, self.cols,
            {k: mx.mat_map(m, fn) for k, m in self.coeffs.items()}, self.backend,
        )

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, LoopMatrix):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("LoopMatrix is unhashable")

    def at_lambda(self, lam):
        """Collapse the loop parameter exactly; returns a plain matrix."""
        return mx.freeze(
            tuple(
                tuple(self.entry(i, j).at_lambda(lam) for j in range(self.cols))
                for i in range(self.rows)
            )
        )

    def evaluate(self, z, lam):
        """Numeric coefficient matrix at (z, lambda) as a numpy array."""
        import numpy as np

        lam = complex(lam)
        if lam == 0 and any(k < 0 for k in self.coeffs):
            raise LambdaZero("negative loop powers evaluated at lambda = 0")
        out = np.zeros((self.rows, self.cols), dtype=complex)
        for k, m in self.coeffs.items():
            if self.backend == "exact":
                vals = np.array(
                    [[x.evaluate(z) for x in row] for row in m], dtype=complex
                )
            else:
                vals = np.array(m, dtype=complex)
            out += vals * lam**k
        return out

    def to_float(self, z=None):
        """Bind exact entries at a sample; loop parameter stays formal."""
        if self.backend == "float":
            return self
        return LoopMatrix(
            self.rows, self.cols,
            {
                k: tuple(tuple(x.evaluate(z) for x in row) for row in m)
                for k, m in self.coeffs.items()
            },
            "float",
        )

    def max_abs(self) -> float:
        """Largest entry magnitude across powers (float backend)."""
        if self.backend != "float":
            raise ValueError("max_abs is a float-backend measure")
        best = 0.0
        for m in self.coeffs.values():
            for row in m:
                for x in row:
                    a = abs(x)
                    if a > best:
                        best = a
        return best

    def __repr__(self):
        return "LoopMatrix(%dx%d, powers=%s, %s)" % (
            self.rows, self.cols, sorted(self.coeffs), self.backend,
        )


def mat_mul(*factors):
    """Convenience chain product of LoopMatrix factors."""
    acc = factors[0]
    for f in factors[1:]:
        acc = acc @ f
    return acc


def unipotent_inverse(U: LoopMatrix) -> LoopMatrix:
    """Inverse of I + N with N nilpotent: alternating Neumann series.

    Raises if the series does not terminate within the dimension bound,
    which means U was not unipotent.
    """
    if U.rows != U.cols:
        raise ValueError("unipotent_inverse needs a square loop matrix")
    ident = LoopMatrix.identity(U.rows, U.backend)
    N = U - ident
    acc = ident
    term = ident
    for _ in range(U.rows + 1):
        term = term @ N
        if term.is_zero():
            return acc
        acc = acc - term if _ % 2 == 0 else acc + term
    raise ValueError("matrix is not unipotent; Neumann series did not terminate")
