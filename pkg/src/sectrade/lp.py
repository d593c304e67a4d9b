"""The two stopping LPs, their dual certificates, and feasibility checks.

The *strong* pair bounds how often any rank-based stopping rule can end
with the single best buyer.  Its primal, over variables x_{i,j} = P(sell
to the j-th buyer, best-so-far, when the seller arrived i-th), is

    max  sum_{i<=j} (1/(n+1)) (j/n) x_{i,j}
    s.t. j x_{i,j} + sum_{k=i}^{j-1} x_{i,k} <= 1,      x >= 0,

and the dual asks for y_{i,j} >= 0 with j y_{i,j} + sum_{k>j} y_{i,k} >=
j/((n+1) n).  The closed-form certificate uses suffix harmonic sums,

    a_j = (1 - sum_{k=j}^{n-1} 1/k) / ((n+1) n),   y_{i,j} = max(a_j, 0),

whose objective sum_j j y_j falls to (e^2+1)/(4e^2) as n grows.

The *weak* pair adds second-best stopping variables y_{i,j} and a scalar A
bounded by the two welfare expressions that drive the 1.76239 bound; its
dual certificate is produced by the two backward-sweep loops of
``weak_dual_certificate`` (one running suffix sum, assignments that hold
the binding constraint with equality, and two break points j*, j**).

Dual variables never depend on the seller position i, so certificates
store one value per j and all feasibility checks run in O(n); that is what
makes n = 2 * 10^6 routine.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import SizeCapError
from .simplex import SimplexResult, simplex_solve_arrays

SIZE_CAP = 60


@dataclass(frozen=True)
class LinearProgram:
    """Sparse named-variable LP container."""

    sense: str
    objective: dict
    constraints: tuple  # of (coefs: dict, rel: str, rhs: float)
    variables: tuple    # ordered registry; all variables are >= 0

    def n_variables(self) -> int:
        return len(self.variables)

    def n_constraints(self) -> int:
        return len(self.constraints)

    def to_arrays(self):
        index = {v: k for k, v in enumerate(self.variables)}
        c = np.zeros(len(self.variables))
        for v, coef in self.objective.items():
            c[index[v]] = coef
        A = np.zeros((len(self.constraints), len(self.variables)))
        b = np.zeros(len(self.constraints))
        rels = []
        for row, (coefs, rel, rhs) in enumerate(self.constraints):
            for v, coef in coefs.items():
                A[row, index[v]] = coef
            b[row] = rhs
            rels.append(rel)
        return c, A, b, rels


def _check_cap(n: int) -> None:
    if not (1 <= n <= SIZE_CAP):
        raise SizeCapError(f"need 1 <= n <= {SIZE_CAP}, got {n}")


def build_strong_primal(n: int) -> LinearProgram:
    """Stopping LP for the best-buyer objective; n(n+1)/2 variables."""
    _check_cap(n)
    variables = []
    objective = {}
    constraints = []
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            variables.append(f"x_{i}_{j}")
            objective[f"x_{i}_{j}"] = j / (n * (n + 1))
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            coefs = {f"x_{i}_{k}": 1.0 for k in range(i, j)}
            coefs[f"x_{i}_{j}"] = coefs.get(f"x_{i}_{j}", 0.0) + float(j)
            constraints.append((coefs, "<=", 1.0))
    return LinearProgram(sense="max", objective=objective,
                         constraints=tuple(constraints),
                         variables=tuple(variables))


def build_weak_primal(n: int) -> LinearProgram:
    """Max-min LP behind the weak lower bound; 2 n(n+1)/2 + 1 variables."""
    _check_cap(n)
    variables = []
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            variables.append(f"x_{i}_{j}")
            variables.append(f"y_{i}_{j}")
    variables.append("A")
    constraints = []
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            drag = {}
            for k in range(i, j):
                drag[f"x_{i}_{k}"] = 1.0
                drag[f"y_{i}_{k}"] = 1.0
            cx = dict(drag)
            cx[f"x_{i}_{j}"] = cx.get(f"x_{i}_{j}", 0.0) + float(j)
            constraints.append((cx, "<=", 1.0))
            cy = dict(drag)
            cy[f"y_{i}_{j}"] = cy.get(f"y_{i}_{j}", 0.0) + float(j)
            constraints.append((cy, "<=", 1.0))
    top = {"A": 1.0}
    second = {"A": 1.0}
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            w = j / (n * n + n)
            top[f"x_{i}_{j}"] = -2.0 * w
            second[f"x_{i}_{j}"] = -1.5 * w * (2 * n - j) / n
            second[f"y_{i}_{j}"] = -1.5 * w * (j - 1) / n
    constraints.append((top, "<=", 0.0))
    constraints.append((second, "<=", 0.0))
    return LinearProgram(sense="max", objective={"A": 1.0},
                         constraints=tuple(constraints),
                         variables=tuple(variables))


@dataclass
class PrimalSolution:
    """Named solution of either primal, with a from-scratch residual check."""

    x: dict
    y: dict
    A: float | None
    objective_value: float

    def max_violation(self, lp: LinearProgram) -> float:
        vals = {}
        for (i, j), v in self.x.items():
            vals[f"x_{i}_{j}"] = v
        for (i, j), v in self.y.items():
            vals[f"y_{i}_{j}"] = v
        if self.A is not None:
            vals["A"] = self.A
        worst = 0.0
        for coefs, rel, rhs in lp.constraints:
            lhs = sum(coef * vals.get(v, 0.0) for v, coef in coefs.items())
            gap = lhs - rhs if rel == "<=" else rhs - lhs
            worst = max(worst, gap)
        worst = max(worst, max((-v for v in vals.values()), default=0.0))
        return worst


def simplex_solve(lp: LinearProgram, pricing: str = "dantzig") -> PrimalSolution:
    """Solve an LP built here and map the solution back to named variables."""
    c, A, b, rels = lp.to_arrays()
    result: SimplexResult = simplex_solve_arrays(c, A, b, rels,
                                                 sense=lp.sense, pricing=pricing)
    x, y, a_val = {}, {}, None
    for name, value in zip(lp.variables, result.values):
        if name == "A":
            a_val = float(value)
            continue
        kind, i, j = name.split("_")
        target = x if kind == "x" else y
        target[(int(i), int(j))] = float(value)
    return PrimalSolution(x=x, y=y, A=a_val,
                          objective_value=float(result.objective))


# ---------------------------------------------------------------------------
# Strong dual certificate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StrongDualCertificate:
    n: int
    a: np.ndarray        # a_j, j = 1..n (index j-1)
    y_pos: np.ndarray    # max(a_j, 0)
    j_star: int
    objective: float
    min_residual: float

    def to_json_dict(self) -> dict:
        return {"n": self.n, "j_star": self.j_star,
                "objective": self.objective,
                "min_residuals": {"dual": self.min_residual}}


def strong_dual_certificate(n: int) -> StrongDualCertificate:
    """O(n) closed-form dual-feasible point via suffix harmonic sums."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    inv_k = 1.0 / np.arange(1.0, float(n))        # 1/k for k = 1..n-1
    suffix = np.zeros(n)
    suffix[:n - 1] = np.cumsum(inv_k[::-1])[::-1]  # sum_{k=j}^{n-1} 1/k
    a = (1.0 - suffix) / (n * (n + 1.0))
    y = np.maximum(a, 0.0)
    j = np.arange(1.0, n + 1.0)
    objective = float(j @ y)
    cert = StrongDualCertificate(
        n=n, a=a, y_pos=y, j_star=math.ceil(1.0 + (n - 1.0) / math.e),
        objective=objective, min_residual=math.nan)
    report = verify_dual_feasibility(cert)
    object.__setattr__(cert, "min_residual", report.min_residual)
    return cert


# ---------------------------------------------------------------------------
# Weak dual certificate (backward-sweep construction)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeakDualCertificate:
    n: int
    w1: float
    w2: float
    alpha: np.ndarray
    beta: np.ndarray
    j_star: int
    j_double_star: int
    objective: float
    min_residual_u: float
    min_residual_v: float

    def to_json_dict(self) -> dict:
        return {"n": self.n, "w1": self.w1, "w2": self.w2,
                "j_star": self.j_star, "j_double_star": self.j_double_star,
                "objective": self.objective,
                "min_residuals": {"u": self.min_residual_u,
                                  "v": self.min_residual_v}}

    def to_csv(self, path, cap: int = 10_000) -> None:
        if self.n > cap:
            raise SizeCapError(f"full alpha/beta dump capped at n={cap}")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["j", "alpha_j", "beta_j"])
            for j in range(1, self.n + 1):
                writer.writerow([j, repr(self.alpha[j - 1]),
                                 repr(self.beta[j - 1])])


def _weak_rhs(n: int, w1: float, w2: float):
    j = np.arange(1.0, n + 1.0)
    denom = n * n + n
    ru = 2.0 * j / denom * w1 + 3.0 * j * (2.0 * n - j) / (2.0 * n * denom) * w2
    rv = 3.0 * j * (j - 1.0) / (2.0 * n * denom) * w2
    return ru, rv


def weak_dual_certificate(n: int, w1: float, w2: float) -> WeakDualCertificate:
    """Backward-sweep dual point: assign alpha_j/beta_j so the binding
    constraint holds with equality against the running suffix sum, break to
    a second alpha-only sweep when beta would go negative (j*), and stop
    that sweep when alpha would too (j**)."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if w1 < 0 or w2 < 0 or abs(w1 + w2 - 1.0) > 1e-12:
        raise ValueError(f"need w1, w2 >= 0 with w1 + w2 = 1, got {w1}, {w2}")
    ru_arr, rv_arr = _weak_rhs(n, w1, w2)
    ru = ru_arr.tolist()
    rv = rv_arr.tolist()
    alpha = [0.0] * n
    beta = [0.0] * n
    s = 0.0
    j_star = 0
    for j in range(n, 0, -1):
        aj = (ru[j - 1] - s) / j
        bj = (rv[j - 1] - s) / j
        if bj < 0.0:
            # discard this sweep's alpha_j too; the next sweep reassigns it
            j_star = j
            break
        alpha[j - 1] = aj
        beta[j - 1] = bj
        s += aj + bj
    j_double_star = 0
    for j in range(j_star, 0, -1):
        aj = (ru[j - 1] - s) / j
        if aj < 0.0:
            j_double_star = j
            break
        alpha[j - 1] = aj
        s += aj
    alpha_arr = np.array(alpha)
    beta_arr = np.array(beta)
    jj = np.arange(1.0, n + 1.0)
    objective = float(jj @ (alpha_arr + beta_arr))
    cert = WeakDualCertificate(
        n=n, w1=w1, w2=w2, alpha=alpha_arr, beta=beta_arr, j_star=j_star,
        j_double_star=j_double_star, objective=objective,
        min_residual_u=math.nan, min_residual_v=math.nan)
    report = verify_dual_feasibility(cert)
    object.__setattr__(cert, "min_residual_u", report.min_residual_u)
    object.__setattr__(cert, "min_residual_v", report.min_residual_v)
    return cert


# ---------------------------------------------------------------------------
# Feasibility verification (recomputes every slack from scratch)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FeasibilityReport:
    kind: str
    min_residual: float
    argmin_j: int
    min_residual_u: float | None = None
    argmin_j_u: int | None = None
    min_residual_v: float | None = None
    argmin_j_v: int | None = None


def verify_dual_feasibility(cert) -> FeasibilityReport:
    """Recompute all dual constraint slacks of a certificate.

    Residual = LHS - RHS per constraint row; feasibility means every
    residual >= 0 (up to roundoff).  The dual rows repeat identically over
    the seller position, so one pass over j covers all of them.
    """
    if isinstance(cert, StrongDualCertificate):
        n = cert.n
        y = cert.y_pos
        j = np.arange(1.0, n + 1.0)
        suffix = np.zeros(n)
        suffix[:-1] = np.cumsum(y[:0:-1])[::-1]   # sum_{k>j} y_k
        residual = j * y + suffix - j / ((n + 1.0) * n)
        arg = int(np.argmin(residual))
        return FeasibilityReport(kind="strong",
                                 min_residual=float(residual[arg]),
                                 argmin_j=arg + 1)
    if isinstance(cert, WeakDualCertificate):
        n = cert.n
        ru, rv = _weak_rhs(n, cert.w1, cert.w2)
        combined = cert.alpha + cert.beta
        suffix = np.zeros(n)
        suffix[:-1] = np.cumsum(combined[:0:-1])[::-1]
        j = np.arange(1.0, n + 1.0)
        res_u = j * cert.alpha + suffix - ru
        res_v = j * cert.beta + suffix - rv
        au, av = int(np.argmin(res_u)), int(np.argmin(res_v))
        worst = min(res_u[au], res_v[av])
        return FeasibilityReport(
            kind="weak", min_residual=float(worst),
            argmin_j=(au if res_u[au] <= res_v[av] else av) + 1,
            min_residual_u=float(res_u[au]), argmin_j_u=au + 1,
            min_residual_v=float(res_v[av]), argmin_j_v=av + 1)
    raise TypeError(f"unknown certificate type {type(cert)}")
