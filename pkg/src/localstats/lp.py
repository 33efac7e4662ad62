"""Exact rational linear programming (two-phase tableau simplex, Bland's rule)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

Row = Mapping[int, Fraction] | Sequence


def as_rational(x) -> Fraction:
    """Exact rational from an int, Fraction or string; floats go through their shortest repr."""
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def _as_dict(coeffs, nvars: int) -> dict[int, Fraction]:
    if isinstance(coeffs, Mapping):
        items = coeffs.items()
    else:
        if len(coeffs) != nvars:
            raise ValueError(f"row width {len(coeffs)} != {nvars}")
        items = enumerate(coeffs)
    out = {}
    for j, a in items:
        if not 0 <= j < nvars:
            raise ValueError(f"column {j} out of range")
        a = Fraction(a)
        if a:
            out[j] = a
    return out


@dataclass
class LinearSystem:
    """Rows ``a.x == b`` (``eq``) and ``a.x <= b`` (``le``) over ``nvars`` variables.

    ``bounds[j]`` is ``(lo, hi)`` with ``None`` for unbounded; the default is
    ``(0, None)``.  Rows may be dense sequences or sparse ``{column: coeff}``.
    """

    nvars: int
    eq: list = field(default_factory=list)
    le: list = field(default_factory=list)
    bounds: list | None = None

    def __post_init__(self):
        self.eq = [(_as_dict(a, self.nvars), Fraction(b)) for a, b in self.eq]
        self.le = [(_as_dict(a, self.nvars), Fraction(b)) for a, b in self.le]
        if self.bounds is None:
            self.bounds = [(Fraction(0), None)] * self.nvars
        if len(self.bounds) != self.nvars:
            raise ValueError("bounds length does not match nvars")
        self.bounds = [
            (None if lo is None else Fraction(lo), None if hi is None else Fraction(hi))
            for lo, hi in self.bounds
        ]

    def add_eq(self, coeffs, rhs) -> None:
        self.eq.append((_as_dict(coeffs, self.nvars), Fraction(rhs)))

    def add_le(self, coeffs, rhs) -> None:
        self.le.append((_as_dict(coeffs, self.nvars), Fraction(rhs)))

    def add_ge(self, coeffs, rhs) -> None:
        a = _as_dict(coeffs, self.nvars)
        self.le.append(({j: -v for j, v in a.items()}, -Fraction(rhs)))

    def copy(self) -> "LinearSystem":
        s = LinearSystem(self.nvars, bounds=list(self.bounds))
        s.eq = list(self.eq)
        s.le = list(self.le)
        return s

    def satisfied_by(self, x: Sequence) -> bool:
        """Exact check of every row and bound."""
        x = [Fraction(v) for v in x]
        if len(x) != self.nvars:
            return False
        for (lo, hi), v in zip(self.bounds, x):
            if (lo is not None and v < lo) or (hi is not None and v > hi):
                return False
        for a, b in self.eq:
            if sum(c * x[j] for j, c in a.items()) != b:
                return False
        for a, b in self.le:
            if sum(c * x[j] for j, c in a.items()) > b:
                return False
        return True


@dataclass
class LPResult:
    status: str  # "optimal" | "unbounded" | "infeasible"
    value: Fraction | None = None
    point: list[Fraction] | None = None


class _Standard:
    """min c.y s.t. A y = b, y >= 0, with b >= 0, built from a LinearSystem."""

    def __init__(self, sys: LinearSystem):
        # column maps: each original variable is off + sum(sign * y_col)
        self.ncols = 0
        self.var_cols: list[list[tuple[int, int]]] = []
        self.offset: list[Fraction] = []
        extra_le: list[tuple[dict[int, Fraction], Fraction]] = []
        for j, (lo, hi) in enumerate(sys.bounds):
            if lo is not None:
                self.var_cols.append([(self._new(), 1)])
                self.offset.append(lo)
                if hi is not None:
                    extra_le.append(({j: Fraction(1)}, hi))
            elif hi is not None:
                self.var_cols.append([(self._new(), -1)])
                self.offset.append(hi)
            else:
                self.var_cols.append([(self._new(), 1), (self._new(), -1)])
                self.offset.append(Fraction(0))
        self.nstruct = self.ncols
        rows: list[tuple[dict[int, Fraction], Fraction]] = []
        for a, b in sys.eq:
            rows.append(self._translate(a, b))
        for a, b in list(sys.le) + extra_le:
            row, rhs = self._translate(a, b)
            row[self._new()] = Fraction(1)
            rows.append((row, rhs))
        self.rows = []
        for row, rhs in rows:
            if rhs < 0:
                row = {k: -v for k, v in row.items()}
                rhs = -rhs
            self.rows.append((row, rhs))

    def _new(self) -> int:
        self.ncols += 1
        return self.ncols - 1

    def _translate(self, a: dict[int, Fraction], b: Fraction):
        row: dict[int, Fraction] = {}
        rhs = b
        for j, c in a.items():
            rhs -= c * self.offset[j]
            for col, sign in self.var_cols[j]:
                row[col] = row.get(col, 0) + sign * c
        return {k: v for k, v in row.items() if v}, rhs

    def objective(self, c: dict[int, Fraction]) -> tuple[dict[int, Fraction], Fraction]:
        out: dict[int, Fraction] = {}
        const = Fraction(0)
        for j, v in c.items():
            const += v * self.offset[j]
            for col, sign in self.var_cols[j]:
                out[col] = out.get(col, 0) + sign * v
        return out, const

    def recover(self, y: list[Fraction]) -> list[Fraction]:
        return [
            off + sum(sign * y[col] for col, sign in cols)
            for off, cols in zip(self.offset, self.var_cols)
        ]


def _pivot(T: list[list[Fraction]], obj: list[Fraction], basis: list[int], r: int, c: int) -> None:
    prow = T[r]
    p = prow[c]
    if p != 1:
        inv = 1 / p
        prow[:] = [v * inv if v else v for v in prow]
    nz = [(k, v) for k, v in enumerate(prow) if v]
    for i, row in enumerate(T):
        if i != r:
            f = row[c]
            if f:
                for k, v in nz:
                    row[k] -= f * v
    f = obj[c]
    if f:
        for k, v in nz:
            obj[k] -= f * v
    basis[r] = c


def _run(T, obj, basis, allowed: int) -> str:
    """Minimize; ``obj`` holds reduced costs with -z in the last slot."""
    m = len(T)
    while True:
        enter = next((j for j in range(allowed) if obj[j] < 0), None)
        if enter is None:
            return "optimal"
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded"
        _pivot(T, obj, basis, best[1], enter)


def _solve(sys: LinearSystem, c: dict[int, Fraction] | None) -> LPResult:
    std = _Standard(sys)
    n = std.ncols
    m = len(std.rows)
    width = n + m + 1
    T = []
    for i, (row, rhs) in enumerate(std.rows):
        line = [Fraction(0)] * width
        for k, v in row.items():
            line[k] = v
        line[n + i] = Fraction(1)
        line[-1] = rhs
        T.append(line)
    basis = [n + i for i in range(m)]
    obj = [Fraction(0)] * width
    for line in T:
        for k in range(n):
            if line[k]:
                obj[k] -= line[k]
        obj[-1] -= line[-1]
    _run(T, obj, basis, n)
    if obj[-1] != 0:
        return LPResult("infeasible")
    # drive artificials out of the basis; drop redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= n:
            col = next((k for k in range(n) if T[i][k]), None)
            if col is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, obj, basis, i, col)
        i += 1
    T = [line[:n] + [line[-1]] for line in T]
    if c is None:
        y = [Fraction(0)] * n
        for i, b in enumerate(basis):
            y[b] = T[i][-1]
        return LPResult("optimal", Fraction(0), std.recover(y))
    cost, const = std.objective(c)
    obj = [Fraction(0)] * (n + 1)
    for k, v in cost.items():
        obj[k] = v
    for i, b in enumerate(basis):
        f = obj[b]
        if f:
            for k, v in enumerate(T[i]):
                if v:
                    obj[k] -= f * v
    status = _run(T, obj, basis, n)
    if status == "unbounded":
        return LPResult("unbounded")
    y = [Fraction(0)] * n
    for i, b in enumerate(basis):
        y[b] = T[i][-1]
    return LPResult("optimal", -obj[-1] + const, std.recover(y))


def feasible(sys: LinearSystem) -> list[Fraction] | None:
    """A witness point satisfying every row exactly, or ``None`` if infeasible."""
    res = _solve(sys, None)
    return res.point if res.status == "optimal" else None


def maximize(sys: LinearSystem, obj) -> LPResult:
    c = _as_dict(obj, sys.nvars)
    res = _solve(sys, {j: -v for j, v in c.items()})
    if res.status == "optimal":
        res.value = -res.value
    return res


def minimize(sys: LinearSystem, obj) -> LPResult:
    return _solve(sys, _as_dict(obj, sys.nvars))
