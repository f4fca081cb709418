"""Construction, evaluation, and export of KKT polynomial systems.

For the problem  max c^T x  over  {x : A0 + x1*A1 + ... + xn*An psd},
first-order optimality after dropping the sign constraints is the
polynomial system in (x, X, Z)

    X = A0 + A(x)          (t_m linear equations)
    A*(Z) + c = 0          (n linear equations)
    X Z = 0                (m*m bilinear equations, not symmetric)

with X and Z parameterized by their t_m = m(m+1)/2 upper-triangular
entries, so the system has n + 2 t_m unknowns and n + t_m + m^2 equations
and Bezout product 2**(m*m).  Variants:

* ``normalized``: c becomes symbolic (n extra unknowns) and the bilinear
  normalization c^T x = 1 is appended; solutions project onto the
  boundary-of-polar variety in the c coordinates.
* ``rank``: additionally forces rank(X) <= r and rank(Z) <= m - r by
  appending all (r+1) and (m-r+1)-sized minors.

Coefficients are exact rationals (floats enter via their shortest decimal
representation), so residual evaluation at rational points is exact and
exports round-trip losslessly.  Solving the systems is out of scope here;
they are exported for external algebraic solvers.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, replace
from decimal import Decimal
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .bounds import pataki_range
from .pencil import Pencil
from .sdp import SdpSolution

# a polynomial is a map {monomial: coefficient}; a monomial is a sorted
# tuple of (variable_index, positive_exponent) pairs; () is the constant
Monomial = tuple[tuple[int, int], ...]
Polynomial = dict[Monomial, Fraction]

VARIANT_PLAIN = "plain"
VARIANT_NORMALIZED = "normalized"
VARIANT_RANK = "rank"


class PatakiViolationError(ValueError):
    """Requested rank lies outside the Pataki range for this shape."""


def to_fraction(value) -> Fraction:
    """Exact rational from ints, Fractions, or floats (shortest decimal)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        return Fraction(Decimal(repr(float(value))))
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


@dataclass(frozen=True)
class SystemInfo:
    """Shape metadata and the Bezout degree product of a system."""

    n: int
    m: int
    variant: str
    bezout_product: int
    rank: int | None = None
    minor_counts: tuple[int, int] | None = None  # (#X minors, #Z minors)


@dataclass(frozen=True)
class PolySystem:
    variables: tuple[str, ...]
    equations: tuple[Polynomial, ...]
    metadata: SystemInfo

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    @property
    def num_equations(self) -> int:
        return len(self.equations)

    def degrees(self) -> list[int]:
        return [poly_degree(eq) for eq in self.equations]


def poly_degree(poly: Polynomial) -> int:
    if not poly:
        return 0
    return max(sum(e for _, e in mono) for mono in poly)


def _poly_add_term(poly: Polynomial, mono: Monomial, coeff: Fraction) -> None:
    if not coeff:
        return
    acc = poly.get(mono)
    if acc is None:
        poly[mono] = coeff
    else:
        acc = acc + coeff
        if acc:
            poly[mono] = acc
        else:
            del poly[mono]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps: dict[int, int] = dict(a)
    for var, e in b:
        exps[var] = exps.get(var, 0) + e
    return tuple(sorted(exps.items()))


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    out: Polynomial = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            _poly_add_term(out, _mono_mul(ma, mb), ca * cb)
    return out


def poly_scale(a: Polynomial, s: Fraction) -> Polynomial:
    if not s:
        return {}
    return {mono: coeff * s for mono, coeff in a.items()}


def _det_poly(mat: list[list[Polynomial]]) -> Polynomial:
    """Determinant of a matrix of polynomials by first-row expansion."""
    size = len(mat)
    if size == 0:
        return {(): Fraction(1)}
    if size == 1:
        return dict(mat[0][0])
    out: Polynomial = {}
    for col in range(size):
        entry = mat[0][col]
        if not entry:
            continue
        minor = [[row[c] for c in range(size) if c != col] for row in mat[1:]]
        term = poly_mul(entry, _det_poly(minor))
        if col % 2:
            term = poly_scale(term, Fraction(-1))
        for mono, coeff in term.items():
            _poly_add_term(out, mono, coeff)
    return out


class _VariableTable:
    """Naming and indexing of (x, X, Z, c) scalar variables."""

    def __init__(self, m: int, n: int, symbolic_c: bool):
        self.m = m
        self.n = n
        self.symbolic_c = symbolic_c
        names = [f"x{i + 1}" for i in range(n)]
        self._x_base = 0
        self._big_x_base = len(names)
        for i in range(1, m + 1):
            for j in range(i, m + 1):
                names.append(f"X_{i}_{j}")
        self._big_z_base = len(names)
        for i in range(1, m + 1):
            for j in range(i, m + 1):
                names.append(f"Z_{i}_{j}")
        self._c_base = len(names)
        if symbolic_c:
            names.extend(f"c{i + 1}" for i in range(n))
        self.names = tuple(names)

    def x(self, i: int) -> int:
        return self._x_base + i

    def _tri(self, i: int, j: int) -> int:
        # upper-triangular offset for 1-based i <= j
        lo, hi = (i, j) if i <= j else (j, i)
        return (lo - 1) * (2 * self.m - lo + 2) // 2 + (hi - lo)

    def big_x(self, i: int, j: int) -> int:
        return self._big_x_base + self._tri(i, j)

    def big_z(self, i: int, j: int) -> int:
        return self._big_z_base + self._tri(i, j)

    def c(self, i: int) -> int:
        if not self.symbolic_c:
            raise ValueError("system has numeric c")
        return self._c_base + i


def _var_poly(idx: int) -> Polynomial:
    return {((idx, 1),): Fraction(1)}


def build_kkt(pencil: Pencil, c: Sequence[float] | None) -> PolySystem:
    """The first-order optimality system for the pencil and objective c.

    Pass ``c=None`` for a symbolic objective (adds n unknowns c1..cn but no
    normalization; see :func:`build_kkt_normalized` for the bounded-polar
    variant).  The complementarity block X Z = 0 is expanded to all m*m
    entries; with the upper-triangular X, Z parameterization the counts are
    n + 2 t_m unknowns (plus n if symbolic) and n + t_m + m^2 equations.
    """
    m, n = pencil.m, pencil.n
    symbolic = c is None
    if not symbolic:
        cv = list(c)
        if len(cv) != n:
            raise ValueError(f"objective must have length {n}, got {len(cv)}")
    table = _VariableTable(m, n, symbolic)
    mats = [[[to_fraction(a[i, j]) for j in range(m)] for i in range(m)] for a in pencil.mats]

    equations: list[Polynomial] = []

    # pencil block: X_ij - sum_k x_k (A_k)_ij = (A0)_ij
    for i in range(1, m + 1):
        for j in range(i, m + 1):
            poly: Polynomial = {}
            _poly_add_term(poly, ((table.big_x(i, j), 1),), Fraction(1))
            for k in range(n):
                _poly_add_term(poly, ((table.x(k), 1),), -mats[k + 1][i - 1][j - 1])
            _poly_add_term(poly, (), -mats[0][i - 1][j - 1])
            equations.append(poly)

    # adjoint block: trace(A_k Z) + c_k = 0
    for k in range(n):
        poly = {}
        for i in range(1, m + 1):
            for j in range(i, m + 1):
                w = Fraction(1) if i == j else Fraction(2)
                _poly_add_term(poly, ((table.big_z(i, j), 1),), w * mats[k + 1][i - 1][j - 1])
        if symbolic:
            _poly_add_term(poly, ((table.c(k), 1),), Fraction(1))
        else:
            _poly_add_term(poly, (), to_fraction(cv[k]))
        equations.append(poly)

    # complementarity block: all m*m entries of X Z
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            poly = {}
            for l in range(1, m + 1):
                mono = _mono_mul(
                    ((table.big_x(i, l), 1),), ((table.big_z(l, j), 1),)
                )
                _poly_add_term(poly, mono, Fraction(1))
            equations.append(poly)

    eq_tuple = tuple(equations)
    bezout = 1
    for eq in eq_tuple:
        bezout *= max(poly_degree(eq), 1)
    info = SystemInfo(n=n, m=m, variant=VARIANT_PLAIN, bezout_product=bezout)
    return PolySystem(variables=table.names, equations=eq_tuple, metadata=info)


def build_kkt_normalized(pencil: Pencil) -> PolySystem:
    """Symbolic-c system plus the normalization c^T x = 1.

    Its solutions, projected on c, cover the boundary of the polar of the
    pencil's spectrahedron.
    """
    base = build_kkt(pencil, None)
    m, n = pencil.m, pencil.n
    table = _VariableTable(m, n, True)
    norm_poly: Polynomial = {}
    for k in range(n):
        _poly_add_term(
            norm_poly, _mono_mul(((table.c(k), 1),), ((table.x(k), 1),)), Fraction(1)
        )
    _poly_add_term(norm_poly, (), Fraction(-1))
    equations = base.equations + (norm_poly,)
    bezout = 1
    for eq in equations:
        bezout *= max(poly_degree(eq), 1)
    info = replace(base.metadata, variant=VARIANT_NORMALIZED, bezout_product=bezout)
    return PolySystem(variables=base.variables, equations=equations, metadata=info)


def build_kkt_rank(pencil: Pencil, r: int, *, force: bool = False) -> PolySystem:
    """Rank-constrained variant: rank(X) <= r and rank(Z) <= m - r.

    Appends every (r+1) x (r+1) minor of X and every (m-r+1) x (m-r+1)
    minor of Z to the normalized system.  Ranks outside the Pataki range
    raise :class:`PatakiViolationError` unless ``force`` is set (the system
    is still well defined, it just cuts out an atypical locus).
    """
    m, n = pencil.m, pencil.n
    rng = pataki_range(m, n)
    if r not in rng.ranks and not force:
        raise PatakiViolationError(
            f"rank {r} outside the Pataki range {list(rng.ranks)} for (m, n) = ({m}, {n})"
        )
    base = build_kkt_normalized(pencil)
    table = _VariableTable(m, n, True)

    def minors(entry, size: int) -> list[Polynomial]:
        if size > m:
            return []
        out = []
        idx = range(1, m + 1)
        for rows in combinations(idx, size):
            for cols in combinations(idx, size):
                mat = [[_var_poly(entry(i, j)) for j in cols] for i in rows]
                out.append(_det_poly(mat))
        return out

    x_minors = minors(table.big_x, r + 1)
    z_minors = minors(table.big_z, m - r + 1)
    equations = base.equations + tuple(x_minors) + tuple(z_minors)
    bezout = 1
    for eq in equations:
        bezout *= max(poly_degree(eq), 1)
    info = replace(
        base.metadata,
        variant=VARIANT_RANK,
        bezout_product=bezout,
        rank=r,
        minor_counts=(len(x_minors), len(z_minors)),
    )
    return PolySystem(variables=base.variables, equations=equations, metadata=info)


def residual(system: PolySystem, assignment: Mapping[str, object]) -> tuple[object, list]:
    """Evaluate every equation at the assignment.

    Returns (max absolute residual, list of per-equation residuals).  The
    arithmetic follows the value types: exact inputs (int, Fraction) give
    exact residuals, floats give floats.  Raises on missing variables.
    """
    missing = [name for name in system.variables if name not in assignment]
    if missing:
        raise ValueError(f"assignment is missing variables: {missing[:5]}")
    values = [assignment[name] for name in system.variables]
    per_eq = []
    for eq in system.equations:
        acc = 0
        for mono, coeff in eq.items():
            term = coeff
            for var, exp in mono:
                term = term * values[var] ** exp
            acc = acc + term
        per_eq.append(acc)
    max_abs = max((abs(v) for v in per_eq), default=0)
    return max_abs, per_eq


def assignment_from_solution(
    system: PolySystem,
    solution: SdpSolution,
    c: Sequence[float] | None = None,
) -> dict[str, float]:
    """Assignment dict for a solver output, keyed by variable name."""
    info = system.metadata
    m, n = info.m, info.n
    out: dict[str, float] = {}
    for i in range(n):
        out[f"x{i + 1}"] = float(solution.x[i])
    for i in range(1, m + 1):
        for j in range(i, m + 1):
            out[f"X_{i}_{j}"] = float(solution.X[i - 1, j - 1])
            out[f"Z_{i}_{j}"] = float(solution.Z[i - 1, j - 1])
    if any(name.startswith("c") for name in system.variables):
        if c is None:
            raise ValueError("system has symbolic c; pass the c vector")
        for i in range(n):
            out[f"c{i + 1}"] = float(c[i])
    return out


# ---------------------------------------------------------------------------
# export / parse


def _format_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _format_term(system: PolySystem, mono: Monomial, coeff: Fraction) -> str:
    parts = [_format_fraction(abs(coeff))]
    for var, exp in mono:
        name = system.variables[var]
        parts.append(name if exp == 1 else f"{name}^{exp}")
    return "*".join(parts)


def _mono_sort_key(system: PolySystem, mono: Monomial):
    total = sum(e for _, e in mono)
    return (-total, mono)


def export_plain(system: PolySystem) -> str:
    """Plain-text export: a vars header, a metadata comment, one equation
    per line as signed rational-coefficient terms ending in ``= 0``."""
    lines = ["vars: " + " ".join(system.variables)]
    if system.equations:
        info = system.metadata
        meta = f"# n={info.n} m={info.m} variant={info.variant}"
        if info.rank is not None:
            meta += f" rank={info.rank}"
        if info.minor_counts is not None:
            meta += f" minors_x={info.minor_counts[0]} minors_z={info.minor_counts[1]}"
        lines.append(meta)
    for eq in system.equations:
        monos = sorted(eq, key=lambda mn: _mono_sort_key(system, mn))
        if not monos:
            lines.append("0 = 0")
            continue
        pieces = []
        for pos, mono in enumerate(monos):
            coeff = eq[mono]
            term = _format_term(system, mono, coeff)
            if pos == 0:
                pieces.append(term if coeff > 0 else f"-{term}")
            else:
                pieces.append(f"+ {term}" if coeff > 0 else f"- {term}")
        lines.append(" ".join(pieces) + " = 0")
    return "\n".join(lines) + "\n"


_TERM_RE = re.compile(r"^(?P<coeff>-?\d+(?:/\d+)?)(?P<rest>(?:\*[A-Za-z]\w*(?:\^\d+)?)*)$")


def parse_plain(text: str) -> PolySystem:
    """Inverse of :func:`export_plain` (metadata recovered from the comment)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("vars:"):
        raise ValueError("expected a 'vars:' header line")
    variables = tuple(lines[0][len("vars:") :].split())
    var_index = {name: i for i, name in enumerate(variables)}
    meta_kv: dict[str, str] = {}
    body = []
    for line in lines[1:]:
        if not line.startswith("#"):
            body.append(line)
            continue
        # metadata comment; other comment lines (manifests etc.) are ignored
        if "=" in line and ":" not in line:
            for part in line[1:].split():
                key, _, val = part.partition("=")
                if val:
                    meta_kv[key] = val

    equations: list[Polynomial] = []
    for line in body:
        expr, _, zero = line.rpartition("=")
        if zero.strip() != "0":
            raise ValueError(f"equation line must end in '= 0': {line!r}")
        expr = expr.strip()
        poly: Polynomial = {}
        if expr == "0":
            equations.append(poly)
            continue
        tokens = expr.replace("- ", "+ -").split("+")
        for tok in tokens:
            tok = tok.strip().replace(" ", "")
            if not tok:
                continue
            match = _TERM_RE.match(tok)
            if match is None:
                raise ValueError(f"cannot parse term {tok!r}")
            coeff = Fraction(match.group("coeff"))
            mono_parts: dict[int, int] = {}
            rest = match.group("rest")
            for piece in filter(None, rest.split("*")):
                name, _, exp = piece.partition("^")
                if name not in var_index:
                    raise ValueError(f"unknown variable {name!r}")
                mono_parts[var_index[name]] = mono_parts.get(var_index[name], 0) + (
                    int(exp) if exp else 1
                )
            _poly_add_term(poly, tuple(sorted(mono_parts.items())), coeff)
        equations.append(poly)

    eq_tuple = tuple(equations)
    bezout = 1
    for eq in eq_tuple:
        bezout *= max(poly_degree(eq), 1)
    n = int(meta_kv.get("n", sum(1 for v in variables if v.startswith("x"))))
    m_val = meta_kv.get("m")
    if m_val is None:
        t_m = sum(1 for v in variables if v.startswith("X_"))
        m_val = str((math.isqrt(8 * t_m + 1) - 1) // 2 if t_m else 0)
    minor_counts = None
    if "minors_x" in meta_kv:
        minor_counts = (int(meta_kv["minors_x"]), int(meta_kv["minors_z"]))
    info = SystemInfo(
        n=n,
        m=int(m_val),
        variant=meta_kv.get("variant", VARIANT_PLAIN),
        bezout_product=bezout,
        rank=int(meta_kv["rank"]) if "rank" in meta_kv else None,
        minor_counts=minor_counts,
    )
    return PolySystem(variables=variables, equations=eq_tuple, metadata=info)


def export_json(system: PolySystem) -> str:
    info = system.metadata
    data = {
        "variables": list(system.variables),
        "metadata": {
            "n": info.n,
            "m": info.m,
            "variant": info.variant,
            "bezout_product": str(info.bezout_product),
            "rank": info.rank,
            "minor_counts": list(info.minor_counts) if info.minor_counts else None,
        },
        "equations": [
            [[[list(pair) for pair in mono], _format_fraction(coeff)] for mono, coeff in eq.items()]
            for eq in system.equations
        ],
    }
    return json.dumps(data)


def parse_json(text: str) -> PolySystem:
    data = json.loads(text)
    variables = tuple(data["variables"])
    equations = []
    for eq_terms in data["equations"]:
        poly: Polynomial = {}
        for mono_pairs, coeff in eq_terms:
            mono = tuple(sorted((int(v), int(e)) for v, e in mono_pairs))
            _poly_add_term(poly, mono, Fraction(coeff))
        equations.append(poly)
    meta = data["metadata"]
    info = SystemInfo(
        n=int(meta["n"]),
        m=int(meta["m"]),
        variant=meta["variant"],
        bezout_product=int(meta["bezout_product"]),
        rank=meta.get("rank"),
        minor_counts=tuple(meta["minor_counts"]) if meta.get("minor_counts") else None,
    )
    return PolySystem(variables=variables, equations=tuple(equations), metadata=info)


def export_system(system: PolySystem, fmt: str) -> str:
    """Serialize to ``plain_text`` or ``json``; both round-trip exactly."""
    if fmt == "plain_text":
        return export_plain(system)
    if fmt == "json":
        return export_json(system)
    raise ValueError(f"unknown export format {fmt!r} (use 'plain_text' or 'json')")


def parse_system(text: str, fmt: str) -> PolySystem:
    if fmt == "plain_text":
        return parse_plain(text)
    if fmt == "json":
        return parse_json(text)
    raise ValueError(f"unknown export format {fmt!r} (use 'plain_text' or 'json')")
