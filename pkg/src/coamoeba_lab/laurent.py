"""Laurent polynomials with complex coefficients: parsing, printing, evaluation.

Coefficients are double-precision complex numbers.  A coefficient built only
from exact tokens (rational literals, ``i``, ``zeta3``) also remembers its
exact polar form ``r * exp(2 pi i p/q)`` with ``r`` and ``p/q`` rational.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import DimensionMismatchError, InputError, ParseError, ZeroPolynomialError
from .polyhedral import Polytope, convex_hull

ZERO_TOL = 1e-14
LETTER_VARS = {"x": 1, "y": 2, "z": 3, "t": 4}


def _phase_value(phase: Fraction) -> complex:
    """exp(2 pi i phase), with exact zeros for multiples of a quarter turn."""
    phase = phase % 1
    quarter = {Fraction(0): 1, Fraction(1, 4): 1j, Fraction(1, 2): -1, Fraction(3, 4): -1j}
    if phase in quarter:
        return complex(quarter[phase])
    z = cmath.exp(2j * math.pi * phase)
    re_, im_ = z.real, z.imag
    if phase.denominator in (3, 6, 12):
        # keep sqrt(3)/2 and 1/2 values symmetric
        re_ = round(re_ * 2) / 2 if abs(re_ * 2 - round(re_ * 2)) < 1e-12 else re_
        im_ = round(im_ * 2) / 2 if abs(im_ * 2 - round(im_ * 2)) < 1e-12 else im_
    return complex(re_, im_)


@dataclass(frozen=True)
class ComplexScalar:
    value: complex
    magnitude: Optional[Fraction] = None
    exact_phase: Optional[Fraction] = None

    @classmethod
    def exact(cls, magnitude, phase=0) -> "ComplexScalar":
        magnitude = Fraction(magnitude)
        phase = Fraction(phase)
        if magnitude < 0:
            magnitude, phase = -magnitude, phase + Fraction(1, 2)
        phase %= 1
        if magnitude == 0:
            return cls(0j, Fraction(0), Fraction(0))
        return cls(float(magnitude) * _phase_value(phase), magnitude, phase)

    @classmethod
    def of(cls, z) -> "ComplexScalar":
        if isinstance(z, ComplexScalar):
            return z
        if isinstance(z, (int, Fraction)):
            return cls.exact(z)
        if isinstance(z, (float, complex)):
            return cls(complex(z))
        raise TypeError(f"cannot convert {type(z).__name__} to a complex scalar")

    @property
    def is_exact(self) -> bool:
        return self.exact_phase is not None

    @property
    def re(self) -> float:
        return self.value.real

    @property
    def im(self) -> float:
        return self.value.imag

    def is_zero(self) -> bool:
        return abs(self.value) <= ZERO_TOL

    def arg_turns(self) -> float:
        """Argument in turns, in [0, 1)."""
        if self.is_exact:
            return float(self.exact_phase)
        return (cmath.phase(self.value) / (2 * math.pi)) % 1.0

    def __mul__(self, other):
        if not isinstance(other, _PLAIN):
            return NotImplemented
        other = ComplexScalar.of(other)
        if self.is_exact and other.is_exact:
            return ComplexScalar.exact(self.magnitude * other.magnitude,
                                       self.exact_phase + other.exact_phase)
        return ComplexScalar(self.value * other.value)

    __rmul__ = __mul__

    def __neg__(self):
        if self.is_exact:
            return ComplexScalar.exact(self.magnitude, self.exact_phase + Fraction(1, 2))
        return ComplexScalar(-self.value)

    def __add__(self, other):
        if not isinstance(other, _PLAIN):
            return NotImplemented
        other = ComplexScalar.of(other)
        if self.is_exact and other.is_exact:
            if self.magnitude == 0:
                return other
            if other.magnitude == 0:
                return self
            if self.exact_phase == other.exact_phase:
                return ComplexScalar.exact(self.magnitude + other.magnitude, self.exact_phase)
            if (self.exact_phase - other.exact_phase) % 1 == Fraction(1, 2):
                return ComplexScalar.exact(self.magnitude - other.magnitude, self.exact_phase)
        return ComplexScalar(self.value + other.value)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def inverse(self) -> "ComplexScalar":
        if self.is_zero():
            raise ZeroDivisionError("division by a zero coefficient")
        if self.is_exact:
            return ComplexScalar.exact(1 / self.magnitude, -self.exact_phase)
        return ComplexScalar(1 / self.value)

    def conjugate(self) -> "ComplexScalar":
        if self.is_exact:
            return ComplexScalar.exact(self.magnitude, -self.exact_phase)
        return ComplexScalar(self.value.conjugate())

    def to_json(self) -> dict:
        out = {"re": self.re, "im": self.im}
        if self.is_exact:
            out["magnitude"] = _fstr(self.magnitude)
            out["phase"] = _fstr(self.exact_phase)
        return out

    @classmethod
    def from_json(cls, data) -> "ComplexScalar":
        if "phase" in data and "magnitude" in data:
            return cls.exact(Fraction(data["magnitude"]), Fraction(data["phase"]))
        return cls(complex(float(data.get("re", 0.0)), float(data.get("im", 0.0))))

    def to_text(self) -> str:
        """Grammar-valid text for this coefficient (see ``parse_polynomial``)."""
        if self.is_exact:
            return _exact_text(self.magnitude, self.exact_phase)
        re_, im_ = self.value.real, self.value.imag
        if im_ == 0:
            return f"({re_!r})"
        if re_ == 0:
            return f"({im_!r}*i)"
        sign = "-" if math.copysign(1.0, im_) < 0 else "+"
        return f"({re_!r}{sign}{abs(im_)!r}*i)"


_PLAIN = (ComplexScalar, int, Fraction, float, complex)


def _fstr(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _exact_text(magnitude: Fraction, phase: Fraction) -> str:
    twelfths = phase * 12
    if twelfths.denominator != 1:
        # phases off the twelfth grid have no finite spelling in the grammar
        z = float(magnitude) * _phase_value(phase)
        return ComplexScalar(z).to_text()
    p = int(twelfths) % 12
    best = None
    for neg in (False, True):
        for a in range(4):
            for b in range(3):
                if (6 * neg + 3 * a + 4 * b) % 12 == p:
                    key = (a + b, neg, a, b)
                    if best is None or key < best:
                        best = key
    _, neg, a, b = best
    factors = [_fstr(magnitude)] if magnitude != 1 or (a == 0 and b == 0) else []
    factors += ["i"] * a + ["zeta3"] * b
    body = "*".join(factors)
    if magnitude.denominator != 1 and len(factors) > 1:
        body = f"({_fstr(magnitude)})*" + "*".join(factors[1:])
    elif magnitude.denominator != 1:
        body = f"({_fstr(magnitude)})"
    return f"-{body}" if neg else body


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class LaurentPolynomial:
    terms: tuple  # ((ComplexScalar, exponent tuple), ...) sorted by exponent
    ambient_dim: int

    @classmethod
    def from_dict(cls, coeffs: dict, n: int, allow_zero: bool = False) -> "LaurentPolynomial":
        terms = []
        for exp, c in coeffs.items():
            c = ComplexScalar.of(c)
            if len(exp) != n:
                raise DimensionMismatchError(f"exponent {exp} has length {len(exp)}, expected {n}")
            if not c.is_zero():
                terms.append((c, tuple(int(e) for e in exp)))
        terms.sort(key=lambda t: t[1])
        if not terms and not allow_zero:
            raise ZeroPolynomialError("polynomial is identically zero")
        return cls(tuple(terms), n)

    @classmethod
    def monomial(cls, exp, coeff=1) -> "LaurentPolynomial":
        return cls.from_dict({tuple(exp): ComplexScalar.of(coeff)}, len(exp))

    def as_dict(self) -> dict:
        return {e: c for c, e in self.terms}

    @property
    def exponents(self) -> list:
        return [e for _, e in self.terms]

    @property
    def coefficients(self) -> list:
        return [c for c, _ in self.terms]

    def __len__(self):
        return len(self.terms)

    def coefficient(self, exp) -> ComplexScalar:
        return self.as_dict().get(tuple(exp), ComplexScalar.exact(0))

    def _combine(self, other, sign):
        out = dict(self.as_dict())
        for c, e in other.terms:
            c = c if sign > 0 else -c
            out[e] = out[e] + c if e in out else c
        return LaurentPolynomial.from_dict(out, self.ambient_dim, allow_zero=True)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __mul__(self, other):
        if not isinstance(other, LaurentPolynomial):
            c = ComplexScalar.of(other)
            return LaurentPolynomial.from_dict({e: a * c for a, e in self.terms},
                                               self.ambient_dim, allow_zero=True)
        out = {}
        for a, e in self.terms:
            for b, f in other.terms:
                g = tuple(x + y for x, y in zip(e, f))
                out[g] = out[g] + a * b if g in out else a * b
        return LaurentPolynomial.from_dict(out, self.ambient_dim, allow_zero=True)

    def is_zero(self) -> bool:
        return not self.terms

    def sub_sum(self, exponents) -> "LaurentPolynomial":
        keep = set(map(tuple, exponents))
        return LaurentPolynomial(tuple(t for t in self.terms if t[1] in keep), self.ambient_dim)

    def is_affine_linear(self) -> bool:
        n = self.ambient_dim
        for e in self.exponents:
            if any(x < 0 for x in e) or sum(e) > 1:
                return False
        return len(self.terms) > 0 and n >= 1

    def pullback(self, m: int) -> "LaurentPolynomial":
        """Substitute x_j -> x_j^m."""
        return LaurentPolynomial(tuple((c, tuple(m * x for x in e)) for c, e in self.terms),
                                 self.ambient_dim)

    def evaluate(self, point) -> complex:
        return evaluate(self, point)

    def __str__(self):
        return to_text(self)

    def to_json(self) -> dict:
        return {"n": self.ambient_dim,
                "terms": [dict(c.to_json(), exp=list(e)) for c, e in self.terms]}

    @classmethod
    def from_json(cls, data) -> "LaurentPolynomial":
        n = int(data["n"])
        coeffs = {}
        for t in data["terms"]:
            e = tuple(int(x) for x in t["exp"])
            if len(e) != n:
                raise DimensionMismatchError(f"exponent {e} does not have length {n}")
            c = ComplexScalar.from_json(t)
            coeffs[e] = coeffs[e] + c if e in coeffs else c
        return cls.from_dict(coeffs, n)


def _power(z: complex, k: int) -> complex:
    if k < 0:
        z, k = 1 / z, -k
    out = 1 + 0j
    while k:
        if k & 1:
            out *= z
        z *= z
        k >>= 1
    return out


def evaluate(f: LaurentPolynomial, point) -> complex:
    pt = [complex(z) for z in point]
    if len(pt) != f.ambient_dim:
        raise DimensionMismatchError(f"point has {len(pt)} coordinates, expected {f.ambient_dim}")
    if any(z == 0 for z in pt):
        raise InputError("Laurent polynomials are evaluated on the torus; a coordinate is zero")
    total = 0j
    for c, e in f.terms:
        term = c.value
        for z, k in zip(pt, e):
            if k:
                term *= _power(z, k)
        total += term
    return total


def newton_polytope(f: LaurentPolynomial) -> Polytope:
    if f.is_zero():
        raise ZeroPolynomialError("zero polynomial has no Newton polytope")
    return convex_hull(f.exponents)


def _monomial_text(exp) -> str:
    parts = []
    for j, k in enumerate(exp, start=1):
        if k == 1:
            parts.append(f"x{j}")
        elif k:
            parts.append(f"x{j}^{k}")
    return "*".join(parts)


def to_text(f: LaurentPolynomial) -> str:
    if not f.terms:
        return "0"
    pieces = []
    for c, e in f.terms:
        mono = _monomial_text(e)
        ctext = c.to_text()
        if not mono:
            piece = ctext
        elif ctext == "1":
            piece = mono
        elif ctext == "-1":
            piece = "-" + mono
        else:
            piece = f"{ctext}*{mono}"
        pieces.append(piece)
    out = pieces[0]
    for p in pieces[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|\n)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>zeta3|x\d+|[A-Za-z_]\w*)
  | (?P<op>\*\*|[-+*/^()])
""", re.VERBOSE)


class _Tokens:
    def __init__(self, text):
        self.items = []
        line, col, pos = 1, 1, 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", line, col)
            kind = m.lastgroup
            tok = m.group()
            if kind != "ws":
                self.items.append((kind, "^" if tok == "**" else tok, line, col))
            if tok == "\n":
                line, col = line + 1, 1
            else:
                col += len(tok)
            pos = m.end()
        self.items.append(("end", "", line, col))
        self.i = 0

    def peek(self):
        return self.items[self.i]

    def next(self):
        tok = self.items[self.i]
        self.i += 1
        return tok


class _Parser:
    """Recursive descent over the grammar; values are coefficient dictionaries."""

    def __init__(self, text, n, variables=None):
        self.toks = _Tokens(text)
        self.n = n
        self.variables = variables if variables is not None else {}

    def fail(self, message, tok=None):
        tok = tok or self.toks.peek()
        raise ParseError(message, tok[2], tok[3])

    def parse(self):
        val = self.expr()
        if self.toks.peek()[0] != "end":
            self.fail(f"unexpected token {self.toks.peek()[1]!r}")
        return val

    def expr(self):
        sign = 1
        if self.toks.peek()[1] in "+-" and self.toks.peek()[0] == "op":
            sign = -1 if self.toks.next()[1] == "-" else 1
        val = self.term()
        if sign < 0:
            val = _neg(val)
        while self.toks.peek()[0] == "op" and self.toks.peek()[1] in ("+", "-"):
            op = self.toks.next()[1]
            rhs = self.term()
            val = _add(val, rhs if op == "+" else _neg(rhs))
        return val

    def _starts_factor(self):
        kind, tok, _, _ = self.toks.peek()
        return kind in ("num", "name") or (kind == "op" and tok == "(")

    def term(self):
        val = self.power()
        while True:
            kind, tok, _, _ = self.toks.peek()
            if kind == "op" and tok == "*":
                self.toks.next()
                val = _mul(val, self.power())
            elif kind == "op" and tok == "/":
                at = self.toks.next()
                val = _mul(val, self._invert(self.power(), at))
            elif self._starts_factor():
                val = _mul(val, self.power())
            else:
                return val

    def power(self):
        base_tok = self.toks.peek()
        val = self.factor()
        if self.toks.peek()[0] == "op" and self.toks.peek()[1] == "^":
            self.toks.next()
            sign = 1
            if self.toks.peek()[1] in ("-", "+") and self.toks.peek()[0] == "op":
                sign = -1 if self.toks.next()[1] == "-" else 1
            kind, tok, line, col = self.toks.next()
            if kind != "num" or not tok.isdigit():
                raise ParseError("exponent must be an integer", line, col)
            k = sign * int(tok)
            if k < 0:
                val = self._invert(val, base_tok)
                k = -k
            out = {(0,) * self.n: ComplexScalar.exact(1)}
            for _ in range(k):
                out = _mul(out, val)
            val = out
        return val

    def factor(self):
        kind, tok, line, col = self.toks.next()
        zero = (0,) * self.n
        if kind == "num":
            if any(ch in tok for ch in ".eE"):
                # decimal literals denote doubles; only integers and ratios are exact
                return {zero: ComplexScalar(complex(float(tok)))}
            return {zero: ComplexScalar.exact(Fraction(tok))}
        if kind == "op" and tok == "(":
            val = self.expr()
            close = self.toks.next()
            if close[1] != ")":
                raise ParseError("expected ')'", close[2], close[3])
            return val
        if kind == "name":
            if tok in self.variables:
                return dict(self.variables[tok])
            if tok == "i":
                return {zero: ComplexScalar.exact(1, Fraction(1, 4))}
            if tok == "zeta3":
                return {zero: ComplexScalar.exact(1, Fraction(1, 3))}
            if tok.startswith("x") and tok[1:].isdigit():
                idx = int(tok[1:])
            elif tok in LETTER_VARS:
                idx = LETTER_VARS[tok]
            else:
                raise ParseError(f"unknown identifier {tok!r}", line, col)
            if idx < 1 or idx > self.n:
                raise DimensionMismatchError(
                    f"variable {tok} exceeds ambient dimension {self.n} (line {line}, column {col})")
            exp = [0] * self.n
            exp[idx - 1] = 1
            return {tuple(exp): ComplexScalar.exact(1)}
        raise ParseError(f"unexpected token {tok!r}" if tok else "unexpected end of input", line, col)

    def _invert(self, val, at):
        live = {e: c for e, c in val.items() if not c.is_zero()}
        if len(live) != 1:
            raise ParseError("division only by a nonzero constant or monomial", at[2], at[3])
        (e, c), = live.items()
        return {tuple(-x for x in e): c.inverse()}


def _add(a, b):
    out = dict(a)
    for e, c in b.items():
        out[e] = out[e] + c if e in out else c
    return out


def _neg(a):
    return {e: -c for e, c in a.items()}


def _mul(a, b):
    out = {}
    for e, c in a.items():
        for f, d in b.items():
            g = tuple(x + y for x, y in zip(e, f))
            out[g] = out[g] + c * d if g in out else c * d
    return out


def parse_polynomial(text: str, ambient_dim: int) -> LaurentPolynomial:
    """Parse a Laurent polynomial in variables x1..xn (x, y, z, t name x1..x4)."""
    if ambient_dim < 1:
        raise InputError("ambient dimension must be at least 1")
    coeffs = _Parser(text, ambient_dim).parse()
    return LaurentPolynomial.from_dict(coeffs, ambient_dim)


def parse_coefficients(text: str, ambient_dim: int, variables: dict) -> dict:
    """Parse to a raw coefficient dictionary with extra named symbols (used for Puiseux input)."""
    return _Parser(text, ambient_dim, variables).parse()


# ---------------------------------------------------------------------------
# variety specifications

INPUT_CLASSES = ("hypersurface", "line", "complete_intersection")


@dataclass(frozen=True)
class VarietySpec:
    polynomials: tuple
    declared_codim: int
    input_class: str

    def __post_init__(self):
        polys = self.polynomials
        if self.input_class not in INPUT_CLASSES:
            raise InputError(f"unknown input class {self.input_class!r}")
        if not polys:
            raise InputError("a variety needs at least one polynomial")
        n = polys[0].ambient_dim
        if any(p.ambient_dim != n for p in polys):
            raise DimensionMismatchError("polynomials live in different ambient dimensions")
        if self.input_class == "hypersurface":
            if len(polys) != 1 or self.declared_codim != 1:
                raise InputError("a hypersurface has exactly one polynomial and codimension 1")
        elif self.input_class == "line":
            if len(polys) != n - 1 or self.declared_codim != n - 1:
                raise InputError(f"a line in dimension {n} needs {n - 1} polynomials")
            if not all(p.is_affine_linear() for p in polys):
                raise InputError("line equations must be affine-linear")
        elif len(polys) != self.declared_codim:
            raise InputError("complete intersection: polynomial count must equal codimension")

    @property
    def ambient_dim(self) -> int:
        return self.polynomials[0].ambient_dim

    @property
    def dim(self) -> int:
        return self.ambient_dim - self.declared_codim

    @classmethod
    def hypersurface(cls, f: LaurentPolynomial) -> "VarietySpec":
        return cls((f,), 1, "hypersurface")

    @classmethod
    def line(cls, polys) -> "VarietySpec":
        polys = tuple(polys)
        return cls(polys, len(polys), "line")

    def pullback(self, m: int) -> "VarietySpec":
        """The system after x_j -> x_j^m; a pulled-back line is a complete intersection."""
        cls_name = "hypersurface" if self.input_class == "hypersurface" else "complete_intersection"
        return VarietySpec(tuple(p.pullback(m) for p in self.polynomials), self.declared_codim,
                           cls_name)

    def to_json(self) -> dict:
        return {"n": self.ambient_dim, "input_class": self.input_class,
                "codim": self.declared_codim,
                "polynomials": [p.to_json() for p in self.polynomials]}

    @classmethod
    def from_json(cls, data) -> "VarietySpec":
        n = int(data["n"])
        polys = []
        for p in data["polynomials"]:
            if isinstance(p, str):
                polys.append(parse_polynomial(p, n))
            else:
                q = LaurentPolynomial.from_json(dict(p, n=p.get("n", n)))
                if q.ambient_dim != n:
                    raise DimensionMismatchError("polynomial dimension differs from system dimension")
                polys.append(q)
        cls_name = data.get("input_class")
        if cls_name is None:
            cls_name = "hypersurface" if len(polys) == 1 else "line"
        codim = int(data.get("codim", len(polys)))
        return cls(tuple(polys), codim, cls_name)
