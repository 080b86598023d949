"""Multivector fields and differential forms on a chart.

Both kinds store components sparsely, keyed by strictly increasing index
tuples; ``A = sum_I A[I] d_{i1} ^ ... ^ d_{ik}``.  Absent keys are zero and
zero components are never stored, so equality is a plain mapping compare.

Conventions
-----------
* Pairing: ``<a1^...^ak, X1^...^Xk> = det[a_i(X_j)]``, hence
  ``<dx^I, d_J> = delta_IJ`` for increasing tuples.
* Forms are alternating maps with the same determinant normalisation, so
  ``(dx^dy)(X, Y) = X^x Y^y - X^y Y^x``; ``i_X`` contracts the first slot.
* Schouten bracket: with multivectors written as polynomials in odd
  variables ``xi_i`` (one per ``d_i``),

      S(P, Q) = sum_i (P <-d/dxi_i) ^ d_i Q  -  d_i P ^ (d/dxi_i-> Q)
      [P, Q]  = (-1)^((p-1)(q-1)) S(P, Q)

  This restricts to the Lie bracket ``X(Y) - Y(X)`` on vector fields and to
  the Lie derivative on ``[X, Q]``.  The extra sign on even-even pairs is
  what makes ``[L, R] = 0, [L, L] = 2 R^L`` equivalent to the Jacobi identity
  of ``{f, g} = <df^dg, L> + f R(g) - g R(f)``; the test-suite checks this
  against a brute-force Jacobiator.  Graded antisymmetry reads
  ``[P, Q] = -(-1)^((p-1)(q-1)) [Q, P]``, i.e. ``[P, Q] = -S(Q, P)``, and the
  bracket is a derivation in its first slot:
  ``[P^Q, S] = [P, S]^Q + (-1)^((s-1)p) P^[Q, S]``.
"""
from __future__ import annotations

from typing import Iterable, Mapping, Union

from .symcore import Chart, Expr

__all__ = [
    "MultiVector",
    "DiffForm",
    "wedge",
    "d",
    "interior",
    "lie_derivative",
    "pairing",
    "schouten",
    "vf_bracket",
    "sharp",
    "bivector_eval",
    "apply_vf",
    "form_on_vf",
    "index_key",
    "parse_index_key",
]

Index = tuple[int, ...]


def _merge(I: Index, J: Index):
    """Sign and sorted tuple for ``e_I ^ e_J``; sign 0 on repeated indices."""
    if not I:
        return 1, J
    if not J:
        return 1, I
    seen = set(I)
    for j in J:
        if j in seen:
            return 0, None
    # parity of inversions between the two sorted blocks
    inv = 0
    for i in I:
        for j in J:
            if i > j:
                inv += 1
    return (-1 if inv & 1 else 1), tuple(sorted(I + J))


def index_key(I: Index, dim: int) -> str:
    """1-based textual key: ``(0, 1) -> "12"`` (comma separated when dim > 9)."""
    if dim > 9:
        return ",".join(str(i + 1) for i in I)
    return "".join(str(i + 1) for i in I)


def parse_index_key(key: str, dim: int) -> Index:
    key = key.strip()
    parts = key.split(",") if ("," in key or dim > 9) else list(key)
    try:
        idx = [int(p) - 1 for p in parts if p.strip()]
    except ValueError:
        raise ValueError(f"bad index key {key!r}") from None
    for i in idx:
        if not 0 <= i < dim:
            raise ValueError(f"index key {key!r} out of range for dimension {dim}")
    return tuple(idx)


class _Antisym:
    """Shared storage and vector-space operations for both tensor kinds."""

    __slots__ = ("chart", "grade", "_c")
    _symbol = "?"

    def __init__(self, chart: Chart, grade: int, components: Union[Mapping, None] = None):
        if not 0 <= grade <= chart.dim:
            raise ValueError(f"grade {grade} out of range for dimension {chart.dim}")
        c: dict[Index, Expr] = {}
        for key, val in (components or {}).items():
            if isinstance(key, str):
                key = parse_index_key(key, chart.dim)
            key = tuple(key)
            if len(key) != grade:
                raise ValueError(f"index {key} does not have grade {grade}")
            if any(not 0 <= i < chart.dim for i in key):
                raise ValueError(f"index {key} out of range")
            if not isinstance(val, Expr):
                val = chart.const(val)
            elif val.chart != chart:
                raise ValueError("component lives on another chart")
            perm_sign = _perm_sign(key)
            if perm_sign == 0:
                continue
            sk = tuple(sorted(key))
            acc = c.get(sk)
            v = val if perm_sign > 0 else -val
            c[sk] = v if acc is None else acc + v
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "grade", grade)
        object.__setattr__(self, "_c", {k: v for k, v in c.items() if not v.is_zero})

    @classmethod
    def _from(cls, chart, grade, comps):
        t = cls.__new__(cls)
        object.__setattr__(t, "chart", chart)
        object.__setattr__(t, "grade", grade)
        object.__setattr__(t, "_c", {k: v for k, v in comps.items() if not v.is_zero})
        return t

    def __setattr__(self, key, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def components(self) -> dict[Index, Expr]:
        return dict(self._c)

    def __getitem__(self, key) -> Expr:
        if isinstance(key, int):
            key = (key,)
        key = tuple(key)
        s = _perm_sign(key)
        if s == 0:
            return self.chart.zero()
        v = self._c.get(tuple(sorted(key)))
        if v is None:
            return self.chart.zero()
        return v if s > 0 else -v

    def items(self):
        return sorted(self._c.items())

    @property
    def is_zero(self) -> bool:
        return not self._c

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.chart != self.chart:
            raise ValueError(f"chart mismatch: {self.chart} vs {other.chart}")
        if other.grade != self.grade:
            raise ValueError(f"grade mismatch: {self.grade} vs {other.grade}")

    def __add__(self, other):
        self._check(other)
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c[k] + v if k in c else v
        return type(self)._from(self.chart, self.grade, c)

    def __neg__(self):
        return type(self)._from(self.chart, self.grade, {k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "_Antisym":
        if not isinstance(f, Expr):
            f = self.chart.const(f)
        return type(self)._from(self.chart, self.grade, {k: f * v for k, v in self._c.items()})

    def __mul__(self, f):
        if isinstance(f, (Expr, int)):
            return self.scale(f)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero
        if type(other) is not type(self):
            return NotImplemented
        return self.chart == other.chart and self.grade == other.grade and self._c == other._c

    def __hash__(self):
        return hash((type(self).__name__, self.chart, self.grade, tuple(sorted(self._c.items()))))

    def diff(self, i: int):
        return type(self)._from(self.chart, self.grade, {k: v.diff(i) for k, v in self._c.items()})

    def subs_chart(self, chart: Chart):
        """Re-express on a chart containing this chart's coordinates."""
        pos = [chart.index(n) for n in self.chart.names]
        c = {}
        for k, v in self._c.items():
            nk = tuple(pos[i] for i in k)
            s = _perm_sign(nk)
            v = v.subs_chart(chart)
            c[tuple(sorted(nk))] = v if s > 0 else -v
        return type(self)._from(chart, self.grade, c)

    def to_dict(self) -> dict[str, str]:
        return {index_key(k, self.chart.dim): str(v) for k, v in self.items()}

    def __str__(self):
        if not self._c:
            return "0"
        names = self.chart.names
        parts = []
        for k, v in self.items():
            basis = "^".join(f"{self._symbol}{names[i]}" for i in k)
            sv = str(v)
            if not k:
                parts.append(sv)
            elif sv == "1":
                parts.append(basis)
            else:
                parts.append(f"({sv})*{basis}")
        return " + ".join(parts)

    def __repr__(self):
        return f"{type(self).__name__}(grade={self.grade}, {self.to_dict()})"


def _perm_sign(seq) -> int:
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    s = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


class MultiVector(_Antisym):
    """Grade-k multivector field ``sum A[I] d_I``; grade 1 is a vector field."""

    __slots__ = ()
    _symbol = "d_"

    @classmethod
    def vector(cls, chart: Chart, comps: Union[Mapping, Iterable]) -> "MultiVector":
        """Vector field from a ``{index_or_name: Expr}`` map or a full list."""
        if isinstance(comps, Mapping):
            items = {}
            for k, v in comps.items():
                i = chart.index(k) if isinstance(k, str) and not k.isdigit() else k
                if isinstance(i, str):
                    i = int(i) - 1
                items[(i,) if isinstance(i, int) else tuple(i)] = v
            return cls(chart, 1, items)
        return cls(chart, 1, {(i,): v for i, v in enumerate(comps)})

    @classmethod
    def scalar(cls, f: Expr) -> "MultiVector":
        return cls(f.chart, 0, {(): f})

    @classmethod
    def basis(cls, chart: Chart, *names: str) -> "MultiVector":
        """``d_a ^ d_b ^ ...`` for the named coordinates."""
        idx = tuple(chart.index(n) for n in names)
        return cls(chart, len(idx), {idx: chart.one()})

    @classmethod
    def zero(cls, chart: Chart, grade: int) -> "MultiVector":
        return cls._from(chart, grade, {})

    def __call__(self, f: Expr) -> Expr:
        """Vector field acting as a derivation."""
        return apply_vf(self, f)


class DiffForm(_Antisym):
    """Grade-k differential form ``sum w[I] dx^I``."""

    __slots__ = ()
    _symbol = "d"

    @classmethod
    def one_form(cls, chart: Chart, comps: Union[Mapping, Iterable]) -> "DiffForm":
        if isinstance(comps, Mapping):
            items = {}
            for k, v in comps.items():
                i = chart.index(k) if isinstance(k, str) else k
                items[(i,) if isinstance(i, int) else tuple(i)] = v
            return cls(chart, 1, items)
        return cls(chart, 1, {(i,): v for i, v in enumerate(comps)})

    @classmethod
    def scalar(cls, f: Expr) -> "DiffForm":
        return cls(f.chart, 0, {(): f})

    @classmethod
    def basis(cls, chart: Chart, *names: str) -> "DiffForm":
        idx = tuple(chart.index(n) for n in names)
        return cls(chart, len(idx), {idx: chart.one()})

    @classmethod
    def zero(cls, chart: Chart, grade: int) -> "DiffForm":
        return cls._from(chart, grade, {})

    @classmethod
    def exact(cls, f: Expr) -> "DiffForm":
        """``df``."""
        return cls._from(f.chart, 1, {(i,): g for i, g in enumerate(f.gradient())})


Tensor = Union[MultiVector, DiffForm]


def _same_chart(*ts):
    chart = ts[0].chart
    for t in ts[1:]:
        if t.chart != chart:
            raise ValueError(f"chart mismatch: {chart} vs {t.chart}")
    return chart


def _accumulate(out: dict, key, val: Expr, sign: int = 1):
    if sign < 0:
        val = -val
    cur = out.get(key)
    out[key] = val if cur is None else cur + val


def wedge(A: Tensor, B: Tensor) -> Tensor:
    """Exterior product, graded commutative: ``A^B = (-1)^{|A||B|} B^A``."""
    if type(A) is not type(B):
        raise TypeError(f"cannot wedge {type(A).__name__} with {type(B).__name__}")
    chart = _same_chart(A, B)
    grade = A.grade + B.grade
    if grade > chart.dim:
        return _zero_overflow(A, grade)
    out: dict = {}
    for I, a in A._c.items():
        for J, b in B._c.items():
            s, K = _merge(I, J)
            if s:
                _accumulate(out, K, a * b, s)
    return type(A)._from(chart, grade, out)


def _zero_overflow(A, grade):
    # Grades beyond dim have no nonzero tensors; represent as an empty tensor
    # of that nominal grade without the range check.
    t = type(A).__new__(type(A))
    object.__setattr__(t, "chart", A.chart)
    object.__setattr__(t, "grade", grade)
    object.__setattr__(t, "_c", {})
    return t


def d(w: DiffForm) -> DiffForm:
    """Exterior derivative; a grade-0 form is a function."""
    if not isinstance(w, DiffForm):
        raise TypeError("d expects a DiffForm")
    chart = w.chart
    if w.grade >= chart.dim:
        return _zero_overflow(w, w.grade + 1)
    out: dict = {}
    for I, a in w._c.items():
        for j in range(chart.dim):
            if j in I:
                continue
            da = a.diff(j)
            if da.is_zero:
                continue
            s, K = _merge((j,), I)
            _accumulate(out, K, da, s)
    return DiffForm._from(chart, w.grade + 1, out)


def interior(X: MultiVector, w: DiffForm) -> DiffForm:
    """Contraction of a vector field into the first slot of a form."""
    if not isinstance(X, MultiVector) or X.grade != 1:
        raise TypeError("interior expects a vector field (grade-1 MultiVector)")
    if not isinstance(w, DiffForm):
        raise TypeError("interior expects a DiffForm")
    if w.grade < 1:
        raise ValueError("cannot contract a vector field into a 0-form")
    chart = _same_chart(X, w)
    out: dict = {}
    for I, a in w._c.items():
        for m, i in enumerate(I):
            xi = X._c.get((i,))
            if xi is None:
                continue
            _accumulate(out, I[:m] + I[m + 1:], xi * a, -1 if m & 1 else 1)
    return DiffForm._from(chart, w.grade - 1, out)


def apply_vf(X: MultiVector, f: Expr) -> Expr:
    """``X(f) = sum X^i d_i f``."""
    if X.grade != 1:
        raise ValueError("only vector fields act on functions")
    if f.chart != X.chart:
        raise ValueError("chart mismatch")
    acc = X.chart.zero()
    for (i,), xi in X._c.items():
        acc = acc + xi * f.diff(i)
    return acc


def form_on_vf(w: DiffForm, X: MultiVector) -> Expr:
    """``w(X)`` for a 1-form ``w``."""
    if w.grade != 1 or X.grade != 1:
        raise ValueError("form_on_vf needs a 1-form and a vector field")
    _same_chart(w, X)
    acc = X.chart.zero()
    for k, a in w._c.items():
        xi = X._c.get(k)
        if xi is not None:
            acc = acc + a * xi
    return acc


def pairing(w: DiffForm, A: MultiVector) -> Expr:
    """Full contraction with the determinant normalisation."""
    if not isinstance(w, DiffForm) or not isinstance(A, MultiVector):
        raise TypeError("pairing expects (DiffForm, MultiVector)")
    if w.grade != A.grade:
        raise ValueError(f"grade mismatch: form {w.grade} vs multivector {A.grade}")
    chart = _same_chart(w, A)
    acc = chart.zero()
    for k, a in w._c.items():
        b = A._c.get(k)
        if b is not None:
            acc = acc + a * b
    return acc


def _dxi_right(P: MultiVector, i: int) -> dict:
    out: dict = {}
    k = P.grade
    for I, a in P._c.items():
        if i in I:
            m = I.index(i)
            _accumulate(out, I[:m] + I[m + 1:], a, -1 if (k - 1 - m) & 1 else 1)
    return out


def _dxi_left(P: MultiVector, i: int) -> dict:
    out: dict = {}
    for I, a in P._c.items():
        if i in I:
            m = I.index(i)
            _accumulate(out, I[:m] + I[m + 1:], a, -1 if m & 1 else 1)
    return out


def _wedge_dicts(A: dict, B: dict, out: dict, sign: int):
    for I, a in A.items():
        if a.is_zero:
            continue
        for J, b in B.items():
            s, K = _merge(I, J)
            if s:
                _accumulate(out, K, a * b, s * sign)


def schouten(A: MultiVector, B: MultiVector) -> MultiVector:
    """Schouten-Nijenhuis bracket (see the module docstring for the sign)."""
    if not isinstance(A, MultiVector) or not isinstance(B, MultiVector):
        raise TypeError("schouten expects two MultiVectors")
    chart = _same_chart(A, B)
    p, q = A.grade, B.grade
    if p + q < 1:
        raise ValueError("schouten bracket of two functions is undefined")
    grade = p + q - 1
    if grade > chart.dim:
        return _zero_overflow(A, grade)
    sign = -1 if ((p - 1) * (q - 1)) & 1 else 1
    out: dict = {}
    for i in range(chart.dim):
        if p:
            rA = _dxi_right(A, i)
            if rA:
                _wedge_dicts(rA, {k: v.diff(i) for k, v in B._c.items()}, out, sign)
        if q:
            lB = _dxi_left(B, i)
            if lB:
                _wedge_dicts({k: v.diff(i) for k, v in A._c.items()}, lB, out, -sign)
    return MultiVector._from(chart, grade, out)


def vf_bracket(X: MultiVector, Y: MultiVector) -> MultiVector:
    """Lie bracket ``[X, Y]^i = X(Y^i) - Y(X^i)``."""
    if X.grade != 1 or Y.grade != 1:
        raise ValueError("vf_bracket expects vector fields")
    chart = _same_chart(X, Y)
    out = {}
    for i in range(chart.dim):
        yi, xi = Y[i], X[i]
        out[(i,)] = apply_vf(X, yi) - apply_vf(Y, xi)
    return MultiVector._from(chart, 1, out)


def lie_derivative(X: MultiVector, T: Tensor) -> Tensor:
    """``L_X T``: ``X(f)`` on functions, Cartan's formula on forms, ``[X, T]`` on multivectors."""
    if not isinstance(X, MultiVector) or X.grade != 1:
        raise TypeError("lie_derivative differentiates along a vector field")
    _same_chart(X, T)
    if isinstance(T, Expr):
        return apply_vf(X, T)
    if T.grade == 0:
        return type(T)(T.chart, 0, {(): apply_vf(X, T[()])})
    if isinstance(T, DiffForm):
        res = interior(X, d(T))
        return res + d(interior(X, T))
    return schouten(X, T)


def sharp(L: MultiVector, a: DiffForm) -> MultiVector:
    """``L^#(a)``: the vector field ``f -> L(a, df)``."""
    if L.grade != 2 or a.grade != 1:
        raise ValueError("sharp needs a bivector and a 1-form")
    chart = _same_chart(L, a)
    out: dict = {}
    for (i, j), lij in L._c.items():
        ai = a._c.get((i,))
        if ai is not None:
            _accumulate(out, (j,), ai * lij)
        aj = a._c.get((j,))
        if aj is not None:
            _accumulate(out, (i,), aj * lij, -1)
    return MultiVector._from(chart, 1, out)


def bivector_eval(L: MultiVector, a: DiffForm, b: DiffForm) -> Expr:
    """``L(a, b) = <a^b, L>``."""
    return form_on_vf(b, sharp(L, a))
