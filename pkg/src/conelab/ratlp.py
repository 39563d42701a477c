"""Exact rational linear programming kernel.

Everything here is exact: inputs are converted to ``gmpy2.mpq`` for the
simplex iterations and results are handed back as ``fractions.Fraction``.
Witnesses and Farkas certificates are re-checked by substitution before they
leave :func:`solve`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq

DESK_SCALE_LIMIT = 64


class StructuralError(ValueError):
    """Malformed input: width mismatch, bad dimensions."""


class DeskScaleExceeded(ValueError):
    """Input is above the size guard of an exponential-time routine."""


class Status(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"


_SMALL = {k: Fraction(k) for k in range(-16, 17)}


def frac(x) -> Fraction:
    """Coerce ints, strings, Fractions and mpq values to Fraction."""
    t = type(x)
    if t is Fraction:
        return x
    if t is int and -16 <= x <= 16:
        return _SMALL[x]
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"not an exact rational: {x!r}")


def _q(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def _f(x: mpq) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v) if a and b), Fraction(0))


@dataclass(frozen=True)
class LinearSystem:
    """Rows ``eq[i] . x == eq_rhs[i]`` and ``ge[i] . x >= ge_rhs[i]``.

    Variables are nonnegative unless their index is in ``free``.
    ``objective``, when given, is maximized.
    """

    num_vars: int
    eq: tuple = ()
    eq_rhs: tuple = ()
    ge: tuple = ()
    ge_rhs: tuple = ()
    objective: tuple | None = None
    free: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "eq", tuple(tuple(frac(a) for a in r) for r in self.eq))
        object.__setattr__(self, "ge", tuple(tuple(frac(a) for a in r) for r in self.ge))
        eq_rhs = self.eq_rhs or (0,) * len(self.eq)
        ge_rhs = self.ge_rhs or (0,) * len(self.ge)
        object.__setattr__(self, "eq_rhs", tuple(frac(a) for a in eq_rhs))
        object.__setattr__(self, "ge_rhs", tuple(frac(a) for a in ge_rhs))
        if self.objective is not None:
            object.__setattr__(self, "objective", tuple(frac(a) for a in self.objective))
        object.__setattr__(self, "free", frozenset(self.free))
        self.check()

    def check(self) -> None:
        n = self.num_vars
        for name, rows, rhs in (("eq", self.eq, self.eq_rhs), ("ge", self.ge, self.ge_rhs)):
            if len(rows) != len(rhs):
                raise StructuralError(f"{name}: {len(rows)} rows but {len(rhs)} right-hand sides")
            for i, r in enumerate(rows):
                if len(r) != n:
                    raise StructuralError(f"{name} row {i} has width {len(r)}, expected {n}")
        if self.objective is not None and len(self.objective) != n:
            raise StructuralError(f"objective has width {len(self.objective)}, expected {n}")
        if any(not 0 <= j < n for j in self.free):
            raise StructuralError("free variable index out of range")

    @property
    def rows(self) -> tuple:
        return self.eq + self.ge

    def satisfied_by(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.num_vars:
            return False
        if any(x[j] < 0 for j in range(self.num_vars) if j not in self.free):
            return False
        if any(dot(r, x) != b for r, b in zip(self.eq, self.eq_rhs)):
            return False
        return all(dot(r, x) >= b for r, b in zip(self.ge, self.ge_rhs))

    def is_farkas_certificate(self, y: Sequence[Fraction]) -> bool:
        """Check that ``y`` proves infeasibility.

        ``y`` holds one multiplier per row (equalities first). Multipliers of
        ``>=`` rows must be nonnegative; the combined row must be ``<= 0`` on
        nonnegative variables and ``0`` on free ones while the combined
        right-hand side is positive, giving ``0 >= positive``.
        """
        m_eq = len(self.eq)
        if len(y) != m_eq + len(self.ge):
            return False
        if any(v < 0 for v in y[m_eq:]):
            return False
        combined = [Fraction(0)] * self.num_vars
        for mult, row in zip(y, self.rows):
            if mult:
                for j, a in enumerate(row):
                    if a:
                        combined[j] += mult * a
        for j, c in enumerate(combined):
            if j in self.free and c != 0:
                return False
            if c > 0:
                return False
        return dot(y, self.eq_rhs + self.ge_rhs) > 0

    def is_ray(self, r: Sequence[Fraction]) -> bool:
        """Recession direction improving the objective."""
        if self.objective is None or len(r) != self.num_vars:
            return False
        if any(r[j] < 0 for j in range(self.num_vars) if j not in self.free):
            return False
        if any(dot(row, r) != 0 for row in self.eq):
            return False
        if any(dot(row, r) < 0 for row in self.ge):
            return False
        return dot(self.objective, r) > 0


@dataclass
class LpOutcome:
    status: Status
    witness: list | None = None
    certificate: list | None = None
    ray: list | None = None
    value: Fraction | None = None
    pivots: int = 0


class _Tableau:
    """Sparse simplex tableau over mpq (rows are dicts of nonzeros), Bland's rule.

    Row ``i`` stores its right-hand side under key ``RHS``; the cost row stores
    ``-c_B x_B`` there.
    """

    RHS = -1

    def __init__(self, rows, ncols):
        self.rows = rows
        self.m = len(rows)
        self.n = ncols
        self.basis = [-1] * self.m
        self.cost = {}
        self.pivots = 0

    def set_objective(self, c):
        # reduced costs d_j = c_j - c_B B^-1 A_j
        d = dict(c)
        for i, b in enumerate(self.basis):
            cb = c.get(b)
            if cb:
                for j, v in self.rows[i].items():
                    nv = d.get(j, 0) - cb * v
                    if nv:
                        d[j] = nv
                    else:
                        d.pop(j, None)
        self.cost = d

    @staticmethod
    def _axpy(row, f, prow):
        for j, v in prow.items():
            nv = row.get(j, 0) - f * v
            if nv:
                row[j] = nv
            else:
                del row[j]

    def pivot(self, r, col):
        prow = self.rows[r]
        p = prow[col]
        if p != 1:
            inv = 1 / p
            prow = {j: v * inv for j, v in prow.items()}
            self.rows[r] = prow
        for i, row in enumerate(self.rows):
            if i != r:
                f = row.get(col)
                if f:
                    self._axpy(row, f, prow)
        f = self.cost.get(col)
        if f:
            self._axpy(self.cost, f, prow)
        self.basis[r] = col
        self.pivots += 1

    def value(self, i):
        return self.rows[i].get(self.RHS, mpq(0))

    def run(self, allowed):
        """Iterate to optimality. Returns the unbounded column or None."""
        RHS = self.RHS
        while True:
            neg = [j for j, v in self.cost.items() if v < 0 and 0 <= j < allowed]
            if not neg:
                return None
            enter = min(neg)
            best = None
            leave = -1
            for i, row in enumerate(self.rows):
                a = row.get(enter)
                if a is not None and a > 0:
                    ratio = row.get(RHS, 0) / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                        best, leave = ratio, i
            if leave < 0:
                return enter
            self.pivot(leave, enter)


def solve(system: LinearSystem) -> LpOutcome:
    """Solve ``system`` exactly with a two-phase simplex (Bland's rule).

    Returns FEASIBLE with a witness when there is no objective, OPTIMAL with a
    basic optimal witness and value, UNBOUNDED with a feasible witness plus an
    improving ray, or INFEASIBLE with a Farkas certificate (one multiplier per
    row, equalities first).
    """
    system.check()
    n = system.num_vars
    RHS = _Tableau.RHS
    # standard-form columns: each var (split if free), then one slack per ge row
    col_of = []
    ncols = 0
    for j in range(n):
        if j in system.free:
            col_of.append((ncols, ncols + 1))
            ncols += 2
        else:
            col_of.append((ncols, None))
            ncols += 1
    n_struct = ncols + len(system.ge)
    m_eq = len(system.eq)
    rows, signs = [], []
    for i, (r, b) in enumerate(zip(system.rows, system.eq_rhs + system.ge_rhs)):
        b = _q(b)
        s = -1 if b < 0 else 1
        row = {}
        for j, a in enumerate(r):
            if a:
                pos, neg = col_of[j]
                a = _q(a) * s
                row[pos] = a
                if neg is not None:
                    row[neg] = -a
        if i >= m_eq:
            row[ncols + i - m_eq] = mpq(-s)
        if b:
            row[RHS] = b * s
        row[n_struct + i] = mpq(1)  # artificial
        rows.append(row)
        signs.append(s)
    m = len(rows)
    tab = _Tableau(rows, n_struct + m)
    tab.basis = [n_struct + i for i in range(m)]
    tab.set_objective({n_struct + i: mpq(1) for i in range(m)})
    tab.run(n_struct + m)
    infeas = -tab.cost.get(RHS, 0)
    if infeas > 0:
        y = [_f((1 - tab.cost.get(n_struct + i, 0)) * signs[i]) for i in range(m)]
        if not system.is_farkas_certificate(y):
            raise AssertionError("internal error: Farkas certificate failed verification")
        return LpOutcome(Status.INFEASIBLE, certificate=y, pivots=tab.pivots)
    # drive artificials out of the basis, dropping redundant rows
    keep = []
    for i in range(m):
        if tab.basis[i] >= n_struct:
            col = min((j for j in tab.rows[i] if 0 <= j < n_struct), default=None)
            if col is None:
                continue
            tab.pivot(i, col)
        keep.append(i)
    tab.rows = [{j: v for j, v in tab.rows[i].items() if j < n_struct} for i in keep]
    tab.basis = [tab.basis[i] for i in keep]
    tab.m = len(keep)
    tab.n = n_struct

    def extract(values_by_col):
        out = []
        for pos, neg in col_of:
            v = values_by_col.get(pos, mpq(0))
            if neg is not None:
                v -= values_by_col.get(neg, mpq(0))
            out.append(_f(v))
        return out

    def basic_point():
        return extract({b: tab.value(i) for i, b in enumerate(tab.basis)})

    if system.objective is None:
        x = basic_point()
        if not system.satisfied_by(x):
            raise AssertionError("internal error: witness failed verification")
        return LpOutcome(Status.FEASIBLE, witness=x, pivots=tab.pivots)

    c = {}
    for j, a in enumerate(system.objective):
        if a:
            pos, neg = col_of[j]
            c[pos] = -_q(a)
            if neg is not None:
                c[neg] = _q(a)
    tab.set_objective(c)
    enter = tab.run(n_struct)
    x = basic_point()
    if not system.satisfied_by(x):
        raise AssertionError("internal error: witness failed verification")
    if enter is not None:
        direction = {enter: mpq(1)}
        for i, b in enumerate(tab.basis):
            a = tab.rows[i].get(enter)
            if a:
                direction[b] = -a
        ray = extract(direction)
        if not system.is_ray(ray):
            raise AssertionError("internal error: unbounded ray failed verification")
        return LpOutcome(Status.UNBOUNDED, witness=x, ray=ray, pivots=tab.pivots)
    value = dot(system.objective, x)
    return LpOutcome(Status.OPTIMAL, witness=x, value=value, pivots=tab.pivots)


@dataclass
class Membership:
    """Verdict of a cone membership test.

    ``coefficients`` (member) are nonnegative with ``sum coef*g == target``;
    ``certificate`` (non-member) is a ``w`` with ``w.g <= 0`` for every
    generator and ``w.target > 0``.
    """

    member: bool
    coefficients: list | None = None
    certificate: list | None = None

    def __bool__(self) -> bool:
        return self.member


def _check_dims(vectors: Iterable[Sequence], dim: int) -> None:
    for k, v in enumerate(vectors):
        if len(v) != dim:
            raise StructuralError(f"vector {k} has dimension {len(v)}, expected {dim}")


def cone_member(generators: Sequence[Sequence], target: Sequence) -> Membership:
    """Decide ``target in cone(generators)`` with a certificate either way."""
    dim = len(target)
    _check_dims(generators, dim)
    target = [frac(t) for t in target]
    gens = [[frac(a) for a in g] for g in generators]
    if not gens:
        if all(t == 0 for t in target):
            return Membership(True, coefficients=[])
        w = list(target)
        return Membership(False, certificate=w)
    rows = [[g[k] for g in gens] for k in range(dim)]
    out = solve(LinearSystem(len(gens), eq=rows, eq_rhs=target))
    if out.status is Status.FEASIBLE:
        return Membership(True, coefficients=out.witness)
    w = out.certificate
    if any(dot(w, g) > 0 for g in gens) or dot(w, target) <= 0:
        raise AssertionError("internal error: separating certificate failed verification")
    return Membership(False, certificate=w)


def is_separating(w: Sequence, generators: Sequence[Sequence], target: Sequence) -> bool:
    return all(dot(w, g) <= 0 for g in generators) and dot(w, target) > 0


def _primitive(v: list[Fraction]) -> tuple[Fraction, ...]:
    den = math.lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = math.gcd(*ints)
    return tuple(Fraction(i // g) for i in ints) if g else tuple(Fraction(0) for _ in v)


def extreme_rays(M: Sequence[Sequence], num_vars: int | None = None,
                 limit: int = DESK_SCALE_LIMIT) -> list[tuple[Fraction, ...]]:
    """Extreme rays of ``{lam >= 0 : M lam = 0}`` by double description.

    Rays are returned as primitive integer vectors (as Fractions), sorted.
    Starting from the orthant's unit rays, each equation is intersected in
    turn; two rays on opposite sides are combined only when adjacent (no third
    ray's support sits inside the union of theirs).
    """
    if num_vars is None:
        if not M:
            raise StructuralError("num_vars required when M is empty")
        num_vars = len(M[0])
    _check_dims(M, num_vars)
    if num_vars > limit:
        raise DeskScaleExceeded(f"{num_vars} variables exceeds desk-scale limit {limit}")
    rays = []
    for k in range(num_vars):
        e = [Fraction(0)] * num_vars
        e[k] = Fraction(1)
        rays.append(e)
    for row in M:
        row = [frac(a) for a in row]
        vals = [dot(row, r) for r in rays]
        zero = [r for r, v in zip(rays, vals) if v == 0]
        pos = [(r, v) for r, v in zip(rays, vals) if v > 0]
        neg = [(r, v) for r, v in zip(rays, vals) if v < 0]
        supports = [frozenset(j for j, x in enumerate(r) if x) for r in rays]
        new = list(zero)
        for p, vp in pos:
            sp = frozenset(j for j, x in enumerate(p) if x)
            for q, vq in neg:
                sq = frozenset(j for j, x in enumerate(q) if x)
                union = sp | sq
                adjacent = True
                for s in supports:
                    if s <= union and s != sp and s != sq:
                        adjacent = False
                        break
                if adjacent:
                    new.append([vp * b - vq * a for a, b in zip(p, q)])
        seen = set()
        rays = []
        for r in new:
            key = _primitive(r)
            if key not in seen:
                seen.add(key)
                rays.append(list(key))
    return sorted(tuple(r) for r in rays)
