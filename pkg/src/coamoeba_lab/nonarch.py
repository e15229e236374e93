"""Nonarchimedean side: Puiseux scalars, tropical reductions, amoebas and coamoebas.

Scalars are finite sums ``sum c_g t^g`` with rational exponents and complex
coefficients.  Reductions use the min convention: at weight ``w`` the terms
minimizing ``val(a) + w . alpha`` survive, each replaced by the coefficient of
its lowest power of ``t``.  The residue section is fixed as ``t^g -> 1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .coamoeba import (PointCloud, SamplingGrid, binomial_cosets, directed_distance,
                       sample_coamoeba)
from .errors import InputError, NonBinomialError, PreconditionError, ZeroPolynomialError
from .laurent import ComplexScalar, LaurentPolynomial, VarietySpec, parse_coefficients
from .polyhedral import fstr
from .torus import LiftedArrangement
from .tropical import TropicalComplex, _check_no_monomials, line_circuits, tie_complex

SECTION = "t^gamma -> 1; residue of a is the coefficient of t^val(a)"
INFINITY = math.inf


@dataclass(frozen=True)
class PuiseuxScalar:
    terms: tuple = ()  # (gamma, ComplexScalar), increasing gamma, nonzero coefficients

    @classmethod
    def make(cls, pairs) -> "PuiseuxScalar":
        acc = {}
        for g, c in pairs:
            g = Fraction(g)
            c = ComplexScalar.of(c)
            acc[g] = acc[g] + c if g in acc else c
        return cls(tuple((g, c) for g, c in sorted(acc.items()) if not c.is_zero()))

    @classmethod
    def constant(cls, c) -> "PuiseuxScalar":
        return cls.make([(0, c)])

    @classmethod
    def uniformizer(cls, gamma=1) -> "PuiseuxScalar":
        return cls.make([(gamma, 1)])

    @classmethod
    def of(cls, x) -> "PuiseuxScalar":
        return x if isinstance(x, PuiseuxScalar) else cls.constant(x)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def valuation(self):
        return self.terms[0][0] if self.terms else INFINITY

    @property
    def residue(self) -> ComplexScalar:
        if not self.terms:
            raise ValueError("the zero scalar has no residue")
        return self.terms[0][1]

    def __add__(self, other):
        other = PuiseuxScalar.of(other)
        return PuiseuxScalar.make(list(self.terms) + list(other.terms))

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxScalar(tuple((g, -c) for g, c in self.terms))

    def __sub__(self, other):
        return self + (-PuiseuxScalar.of(other))

    def __rsub__(self, other):
        return PuiseuxScalar.of(other) - self

    def __mul__(self, other):
        other = PuiseuxScalar.of(other)
        return PuiseuxScalar.make([(g + h, c * d) for g, c in self.terms for h, d in other.terms])

    __rmul__ = __mul__

    def inverse(self) -> "PuiseuxScalar":
        if len(self.terms) != 1:
            raise ZeroDivisionError("only single-term scalars are invertible in this representation")
        (g, c), = self.terms
        return PuiseuxScalar(((-g, c.inverse()),))

    def to_json(self) -> list:
        out = []
        for g, c in self.terms:
            d = {"gamma": fstr(g)}
            d.update(c.to_json())
            out.append(d)
        return out

    @classmethod
    def from_json(cls, data) -> "PuiseuxScalar":
        if isinstance(data, dict):
            data = [data]
        return cls.make([(Fraction(d.get("gamma", 0)), ComplexScalar.from_json(d)) for d in data])

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for g, c in self.terms:
            coef = c.to_text()
            parts.append(coef if g == 0 else f"{coef}*t^({fstr(g)})")
        return " + ".join(parts)


def valuation(a: PuiseuxScalar):
    """Smallest exponent; the zero scalar has valuation ``math.inf``."""
    return PuiseuxScalar.of(a).valuation


@dataclass(frozen=True)
class KLaurentPolynomial:
    terms: tuple  # (PuiseuxScalar, exponent tuple), sorted by exponent
    ambient_dim: int

    @classmethod
    def from_dict(cls, coeffs: dict, n: int) -> "KLaurentPolynomial":
        live = {}
        for e, c in coeffs.items():
            c = PuiseuxScalar.of(c)
            if not c.is_zero():
                live[tuple(int(x) for x in e)] = c
        if not live:
            raise ZeroPolynomialError("the polynomial is zero")
        return cls(tuple((live[e], e) for e in sorted(live)), n)

    @property
    def exponents(self) -> list:
        return [e for _, e in self.terms]

    def coefficient(self, exp) -> PuiseuxScalar:
        for c, e in self.terms:
            if e == tuple(exp):
                return c
        return PuiseuxScalar()

    def is_affine_linear(self) -> bool:
        return all(sum(e) <= 1 and min(e) >= 0 for e in self.exponents)

    def __str__(self):
        parts = []
        for c, e in self.terms:
            mono = "*".join(f"x{i + 1}" + (f"^{k}" if k != 1 else "")
                            for i, k in enumerate(e) if k)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {"n": self.ambient_dim,
                "terms": [{"exponent": list(e), "coefficient": c.to_json()} for c, e in self.terms]}

    @classmethod
    def from_json(cls, data) -> "KLaurentPolynomial":
        n = int(data["n"])
        return cls.from_dict({tuple(t["exponent"]): PuiseuxScalar.from_json(t["coefficient"])
                              for t in data["terms"]}, n)


def parse_k_polynomial(text: str, n: int) -> KLaurentPolynomial:
    """Parse a polynomial whose coefficients may involve the uniformizer ``t``."""
    t = {(0,) * n: PuiseuxScalar.uniformizer()}
    raw = parse_coefficients(text, n, {"t": t})
    return KLaurentPolynomial.from_dict(raw, n)


def tropical_reduction(f: KLaurentPolynomial, w) -> LaurentPolynomial:
    """Residues of the terms minimizing ``val(a) + w . alpha``."""
    w = [Fraction(x) for x in w]
    scores = [(c.valuation + sum(a * b for a, b in zip(e, w)), c, e) for c, e in f.terms]
    best = min(s for s, _, _ in scores)
    return LaurentPolynomial.from_dict({e: c.residue for s, c, e in scores if s == best},
                                       f.ambient_dim)


# ---------------------------------------------------------------------------
# specifications over K


@dataclass(frozen=True)
class KVarietySpec:
    polynomials: tuple
    input_class: str = "line"

    def __post_init__(self):
        if not self.polynomials:
            raise InputError("a variety needs at least one polynomial")
        n = self.polynomials[0].ambient_dim
        if self.input_class == "line":
            if len(self.polynomials) != n - 1:
                raise InputError(f"a line in dimension {n} needs {n - 1} polynomials")
            if not all(p.is_affine_linear() for p in self.polynomials):
                raise InputError("line equations must be affine-linear")

    @property
    def ambient_dim(self) -> int:
        return self.polynomials[0].ambient_dim

    def to_json(self) -> dict:
        return {"field": "puiseux", "class": self.input_class,
                "polynomials": [p.to_json() for p in self.polynomials]}

    @classmethod
    def from_json(cls, data) -> "KVarietySpec":
        n = data.get("n")
        polys = []
        for p in data["polynomials"]:
            if isinstance(p, str):
                if n is None:
                    raise InputError("text polynomials need the ambient dimension 'n'")
                polys.append(parse_k_polynomial(p, int(n)))
            else:
                polys.append(KLaurentPolynomial.from_json(p))
        return cls(tuple(polys), data.get("class", "line"))

    @classmethod
    def parse(cls, texts, n: int) -> "KVarietySpec":
        return cls(tuple(parse_k_polynomial(s, n) for s in texts), "line")


def _k_rows(polys):
    n = polys[0].ambient_dim
    rows = []
    for p in polys:
        row = [p.coefficient(tuple(int(i == j) for i in range(n))) for j in range(n)]
        row.append(p.coefficient((0,) * n))
        rows.append(row)
    return rows


def k_circuits(polys) -> list:
    """Circuits of a K-linear system: a tropical basis of the line."""
    n = polys[0].ambient_dim
    out = []
    for vec in line_circuits(_k_rows(polys)):
        coeffs = {}
        for j, c in vec.items():
            coeffs[tuple(int(i == j) for i in range(n)) if j < n else (0,) * n] = c
        out.append(KLaurentPolynomial.from_dict(coeffs, n))
    return out


def _min_functions(polys):
    """Min convention as a max: maximize -val(a) - w . alpha."""
    return [[(e, tuple(-x for x in e), -c.valuation) for c, e in p.terms] for p in polys]


@dataclass
class NAmoebaComplex:
    complex: TropicalComplex
    generators: tuple
    basis: tuple
    reductions: list  # per face: reductions of the generators
    basis_reductions: list  # per face: reductions of the tropical basis
    section: str = SECTION

    @property
    def faces(self) -> list:
        return self.complex.faces

    def minimal_indices(self) -> list:
        return [i for i in range(len(self.complex.faces))
                if not any(j == i for _, j in self.complex.incidence)]

    def vertices(self) -> list:
        return sorted({v for f in self.complex.faces if f.dim == 0 for v in f.vertices})

    def to_json(self) -> dict:
        faces = []
        for face, red in zip(self.complex.faces, self.reductions):
            d = face.to_json()
            d["reduction"] = [str(p) for p in red]
            faces.append(d)
        return {"convention": "min", "section": self.section,
                "faces": faces, "incidence": [list(p) for p in self.complex.incidence],
                "minimal": self.minimal_indices()}


def na_amoeba(spec: KVarietySpec) -> NAmoebaComplex:
    """Nonarchimedean amoeba of a line over K, with faces tagged by their reductions."""
    if spec.input_class != "line":
        raise PreconditionError("na_amoeba is implemented for lines")
    n = spec.ambient_dim
    gens = list(spec.polynomials)
    basis = k_circuits(gens)
    for p in basis:
        if len(p.terms) == 1:
            _check_no_monomials([p], [])
    cx = tie_complex(_min_functions(basis), n, max_dim=1)
    reds, breds = [], []
    for face in cx.faces:
        w = face.interior_point()
        reds.append(tuple(tropical_reduction(p, w) for p in gens))
        breds.append(tuple(tropical_reduction(p, w) for p in basis))
    return NAmoebaComplex(cx, tuple(gens), tuple(basis), reds, breds)


# ---------------------------------------------------------------------------
# coamoeba


@dataclass
class NAStratum:
    face_index: int
    dim: int
    minimal: bool
    reduction: tuple  # LaurentPolynomial system over C
    cosets: list = field(default_factory=list)
    cloud: Optional[PointCloud] = None

    @property
    def kind(self) -> str:
        return "exact" if self.cosets else "sampled"

    def samples(self, per_coset: int = 2000, seed: int = 0) -> np.ndarray:
        if self.cloud is not None:
            return self.cloud.points
        rng = np.random.default_rng(seed)
        return np.concatenate([c.sample(per_coset, rng) for c in self.cosets])

    def to_json(self) -> dict:
        out = {"face": self.face_index, "dim": self.dim, "minimal": self.minimal,
               "kind": self.kind, "reduction": [str(p) for p in self.reduction]}
        if self.cosets:
            out["cosets"] = [c.to_json() for c in self.cosets]
        if self.cloud is not None:
            out["samples"] = len(self.cloud)
        return out


@dataclass
class NACoamoeba:
    amoeba: NAmoebaComplex
    strata: list
    section: str = SECTION

    def minimal_cloud(self) -> np.ndarray:
        pts = [s.samples() for s in self.strata if s.minimal]
        return np.concatenate(pts) if pts else np.zeros((0, self.amoeba.complex.ambient_dim))

    def closure_distances(self, per_coset: int = 2000, seed: int = 0) -> dict:
        """Largest distance from each non-minimal stratum's samples to the minimal clouds."""
        target = self.minimal_cloud()
        out = {}
        for s in self.strata:
            if not s.minimal:
                d = directed_distance(s.samples(per_coset, seed), target)
                out[s.face_index] = float(d.max()) if len(d) else 0.0
        return out

    def arrangement(self, box=None) -> LiftedArrangement:
        members = [c for s in self.strata for c in s.cosets]
        return LiftedArrangement(members, box)

    def to_json(self) -> dict:
        return {"section": self.section, "convention": "min",
                "strata": [s.to_json() for s in self.strata]}


def _independent(system):
    """A maximal linearly independent subfamily of an affine-linear system."""
    n = system[0].ambient_dim
    chosen, rows = [], []
    for p in system:
        row = []
        for j in range(n + 1):
            e = tuple(int(i == j) for i in range(n)) if j < n else (0,) * n
            row.append(p.coefficient(e).value)
        trial = np.array(rows + [row], dtype=complex)
        if np.linalg.matrix_rank(trial, tol=1e-9) > len(rows):
            rows.append(row)
            chosen.append(p)
    return chosen


def _reduction_spec(system) -> VarietySpec:
    polys = _independent(list(system))
    n = polys[0].ambient_dim
    if len(polys) == n - 1:
        return VarietySpec.line(polys)
    raise NonBinomialError("reduction does not cut out a line")


def na_coamoeba(spec: KVarietySpec, grid: Optional[SamplingGrid] = None,
                amoeba: Optional[NAmoebaComplex] = None) -> NACoamoeba:
    """One stratum per face: exact cosets for binomial reductions, samples otherwise."""
    amoeba = amoeba or na_amoeba(spec)
    n = spec.ambient_dim
    minimal = set(amoeba.minimal_indices())
    strata = []
    for i, face in enumerate(amoeba.faces):
        system = [p for p in amoeba.basis_reductions[i]]
        st = NAStratum(i, face.dim, i in minimal, tuple(amoeba.reductions[i]))
        if i not in minimal and all(len(p) == 2 for p in system):
            st.cosets = binomial_cosets(system, n)
        elif all(p.is_affine_linear() for p in system):
            st.cloud = sample_coamoeba(_reduction_spec(system), grid)
        else:
            raise NonBinomialError(f"unsupported reduction class on face {i}")
        strata.append(st)
    return NACoamoeba(amoeba, strata)


def load_k_spec(data) -> KVarietySpec:
    if isinstance(data, str):
        data = json.loads(data)
    return KVarietySpec.from_json(data)
