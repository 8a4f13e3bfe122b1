"""Torus representations: moment maps, capacity minimization, weight-hull
membership, fixed-subspace projectors, and the occasionality decay probe.

A torus of rank r acts diagonally with integer weight vectors; the capacity
of a vector is the infimum of the transformed norm over the group, reached
by minimizing the convex function g(x) = sum_w e^{w.x} |v_w|^2.  Capacity
vanishes exactly when the convex hull of the supported weights misses the
origin, which hull_membership decides exactly for small integer data.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .config import BUDGET, Budgets, ResourceBudgetError
from .tensor import Operator, power_space, space


@dataclass(frozen=True)
class TorusRep:
    """Diagonal action of a rank-r torus, one integer weight per block."""

    rank: int
    weights: tuple[tuple[int, ...], ...]
    block_sizes: tuple[int, ...]

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if len(self.weights) != len(self.block_sizes):
            raise ValueError("one block size per weight required")
        if len(set(self.weights)) != len(self.weights):
            raise ValueError("weights must be distinct")
        for w in self.weights:
            if len(w) != self.rank:
                raise ValueError(f"weight {w} does not have rank {self.rank} entries")
        if any(b < 1 for b in self.block_sizes):
            raise ValueError("block sizes must be >= 1")

    @property
    def dim(self) -> int:
        return sum(self.block_sizes)

    def block_slices(self) -> list[slice]:
        out, start = [], 0
        for b in self.block_sizes:
            out.append(slice(start, start + b))
            start += b
        return out

    def coordinate_weights(self) -> np.ndarray:
        """One weight row per basis coordinate, blocks expanded."""
        rows = []
        for w, b in zip(self.weights, self.block_sizes):
            rows.extend([w] * b)
        return np.array(rows, dtype=np.int64)


def torus_rep(weights: Sequence[Sequence[int]], block_sizes: Sequence[int] | None = None) -> TorusRep:
    ws = tuple(tuple(int(c) for c in w) if hasattr(w, "__len__") else (int(w),)
               for w in weights)
    rank = len(ws[0]) if ws else 1
    sizes = tuple(int(b) for b in block_sizes) if block_sizes else (1,) * len(ws)
    return TorusRep(rank, ws, sizes)


def _as_vector(rep: TorusRep, v) -> np.ndarray:
    vec = np.asarray(v, dtype=np.complex128).ravel()
    if vec.size != rep.dim:
        raise ValueError(f"vector length {vec.size} != representation dim {rep.dim}")
    return vec


def _block_mass(rep: TorusRep, vec: np.ndarray) -> np.ndarray:
    return np.array([float(np.sum(np.abs(vec[sl]) ** 2)) for sl in rep.block_slices()])


def moment_map(rep: TorusRep, v) -> np.ndarray:
    """sum_w (|v_w|^2 / |v|^2) w — a point in the hull of supported weights."""
    vec = _as_vector(rep, v)
    mass = _block_mass(rep, vec)
    total = float(mass.sum())
    if total <= 0.0:
        raise ValueError("moment map of the zero vector is undefined")
    return (mass / total) @ np.array(rep.weights, dtype=float)


def kempf_ness(rep: TorusRep, v, x) -> tuple[float, np.ndarray, np.ndarray]:
    """Value, gradient, and Hessian of g(x) = sum_w e^{w.x} |v_w|^2."""
    vec = _as_vector(rep, v)
    mass = _block_mass(rep, vec)
    wmat = np.array(rep.weights, dtype=float)
    x = np.asarray(x, dtype=float)
    terms = mass * np.exp(wmat @ x)
    value = float(terms.sum())
    grad = terms @ wmat
    hess = wmat.T @ (terms[:, None] * wmat)
    return value, grad, hess


class HullResult(NamedTuple):
    inside: bool
    coefficients: tuple[float, ...] | None
    separator: np.ndarray | None
    margin: float


def _exact_hull_feasibility(weights, target) -> HullResult:
    # phase-1 simplex over the rationals on: sum c_i = 1, sum c_i w_i = t, c >= 0
    ncols = len(weights)
    nrows = len(target) + 1
    rows = []
    for i in range(nrows):
        if i < len(target):
            arow = [Fraction(w[i]) for w in weights]
            rhs = Fraction(target[i])
        else:
            arow = [Fraction(1)] * ncols
            rhs = Fraction(1)
        if rhs < 0:
            arow = [-a for a in arow]
            rhs = -rhs
            sign = -1
        else:
            sign = 1
        rows.append(([*arow, *(Fraction(int(k == i)) for k in range(nrows)), rhs], sign))
    tab = [r for r, _ in rows]
    signs = [s for _, s in rows]
    basis = [ncols + i for i in range(nrows)]

    def objective():
        out = [Fraction(0)] * (ncols + nrows + 1)
        for i, b in enumerate(basis):
            if b >= ncols:
                for j, val in enumerate(tab[i]):
                    out[j] += val
        return out

    while True:
        obj = objective()
        enter = next((j for j in range(ncols) if obj[j] > 0), None)
        if enter is None:
            break
        pivot_row, best = None, None
        for i in range(nrows):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[pivot_row]):
                    pivot_row, best = i, ratio
        if pivot_row is None:
            raise ArithmeticError("phase-1 simplex found an unbounded direction")
        piv = tab[pivot_row][enter]
        tab[pivot_row] = [val / piv for val in tab[pivot_row]]
        for i in range(nrows):
            if i != pivot_row and tab[i][enter] != 0:
                factor = tab[i][enter]
                tab[i] = [a - factor * b for a, b in zip(tab[i], tab[pivot_row])]
        basis[pivot_row] = enter

    obj = objective()
    infeasibility = obj[-1]
    if infeasibility == 0:
        coeffs = [Fraction(0)] * ncols
        for i, b in enumerate(basis):
            if b < ncols:
                coeffs[b] = tab[i][-1]
        return HullResult(True, tuple(float(c) for c in coeffs), None, 0.0)
    # Farkas certificate: y with y.A <= 0 and y.b > 0 read off the artificial columns
    y = [signs[i] * obj[ncols + i] for i in range(nrows)]
    sep = -np.array([float(c) for c in y[:-1]])
    norm = np.linalg.norm(sep)
    if norm > 0:
        sep = sep / norm
    tvec = np.array(target, dtype=float)
    margin = min(float(sep @ np.array(w, dtype=float)) for w in weights) - float(sep @ tvec)
    return HullResult(False, None, sep, margin)


def _gilbert_hull(weights, target, tol: float = 1e-9) -> HullResult:
    wmat = np.array(weights, dtype=float)
    tvec = np.array(target, dtype=float)
    coeff = np.zeros(len(weights))
    start = int(np.argmin(np.linalg.norm(wmat - tvec, axis=1)))
    coeff[start] = 1.0
    point = wmat[start].astype(float).copy()
    for _ in range(200_000):
        grad = point - tvec
        j = int(np.argmin(wmat @ grad))
        gap = float(grad @ (point - wmat[j]))
        if gap <= tol:
            break
        step_dir = wmat[j] - point
        denom = float(step_dir @ step_dir)
        if denom <= 0:
            break
        gamma = min(1.0, max(0.0, -float(grad @ step_dir) / denom))
        coeff *= 1 - gamma
        coeff[j] += gamma
        point = point + gamma * step_dir
    grad = point - tvec
    margin = float(np.min(wmat @ grad)) - float(tvec @ grad)
    if margin > 0:
        return HullResult(False, None, grad / np.linalg.norm(grad), margin / np.linalg.norm(grad))
    return HullResult(True, tuple(coeff), None, 0.0)


def hull_membership(weights: Sequence[Sequence[int]], target: Sequence[float]) -> HullResult:
    """Decide target in conv(weights), with convex coefficients or a strictly
    separating hyperplane as certificate.

    Integer data with rank <= 4 and at most 32 weights is decided exactly in
    rational arithmetic; larger instances fall back to a Gilbert
    distance iteration with gap tolerance 1e-9.
    """
    ws = [tuple(int(c) for c in w) if hasattr(w, "__len__") else (int(w),) for w in weights]
    if not ws:
        raise ValueError("need at least one weight")
    rank = len(ws[0])
    tgt = tuple(target) if hasattr(target, "__len__") else (target,)
    if len(tgt) != rank:
        raise ValueError("target rank mismatch")
    integral = all(float(c).is_integer() for c in tgt)
    if rank <= 4 and len(ws) <= 32 and integral:
        return _exact_hull_feasibility(ws, [int(c) for c in tgt])
    return _gilbert_hull(ws, tgt)


@dataclass(frozen=True)
class CapacityResult:
    value: float
    minimizer: np.ndarray | None
    moment: np.ndarray
    unbounded: bool
    separator: np.ndarray | None = None

    def to_json(self) -> dict:
        return {
            "capacity": self.value,
            "minimizer": None if self.minimizer is None else [float(c) for c in self.minimizer],
            "moment_map": [float(c) for c in self.moment],
            "unbounded": self.unbounded,
        }


def capacity(rep: TorusRep, v, tol_grad: float = 1e-8, max_iter: int = 500) -> CapacityResult:
    """Infimum of the transformed norm over the torus orbit closure.

    Runs a damped Newton iteration on g from x = 0 after an upfront hull
    test; reports value 0 with a separating direction when the supported
    weight hull excludes the origin.  At a minimizer the moment map of the
    transformed vector is zero to tol_grad.
    """
    vec = _as_vector(rep, v)
    mass = _block_mass(rep, vec)
    if mass.sum() <= 0.0:
        raise ValueError("capacity of the zero vector is undefined")
    supported = [w for w, a in zip(rep.weights, mass) if a > 0.0]
    hull = hull_membership(supported, (0,) * rep.rank)
    base_moment = moment_map(rep, vec)
    if not hull.inside:
        return CapacityResult(0.0, None, base_moment, True, hull.separator)

    x = np.zeros(rep.rank)
    for _ in range(max_iter):
        value, grad, hess = kempf_ness(rep, vec, x)
        if np.linalg.norm(grad) / value <= tol_grad:
            return CapacityResult(math.sqrt(value), x, grad / value, False)
        ridge = 1e-12 * max(1.0, float(np.trace(hess)))
        step = -np.linalg.solve(hess + ridge * np.eye(rep.rank), grad)
        slope = float(grad @ step)
        t = 1.0
        for _ in range(60):
            trial = kempf_ness(rep, vec, x + t * step)[0]
            if trial <= value + 1e-4 * t * slope:
                break
            t /= 2
        x = x + t * step
        if np.linalg.norm(x) > 1e3:
            raise ArithmeticError(
                f"minimizer escaped to |x| = {np.linalg.norm(x):.3g} although the "
                "weight hull contains the origin; g may be flat along a face")
    raise ArithmeticError(
        f"Newton failed to reach gradient tolerance {tol_grad} in {max_iter} "
        f"iterations (last relative gradient {np.linalg.norm(grad) / value:.3g})")


# ---------------------------------------------------------------------------
# Fixed subspaces


def _match_member(mat: np.ndarray, members: list[np.ndarray]) -> bool:
    return any(np.max(np.abs(mat - g)) <= 1e-8 for g in members)


def fixed_subspace_projector(rep_or_group, n: int, budget: Budgets = BUDGET) -> Operator:
    """Projector onto the vectors fixed by the n-fold action.

    For a finite group given by its unitary matrices, averages the n-fold
    tensor powers over the group (after validating closure under products).
    For a TorusRep, selects the multi-indices whose coordinate weights sum
    to zero.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(rep_or_group, TorusRep):
        rep = rep_or_group
        d = rep.dim
        if d ** n > budget.dense_dim:
            raise ResourceBudgetError(
                f"projector dimension {d}^{n} exceeds the dense budget {budget.dense_dim}")
        wrows = rep.coordinate_weights()
        sums = np.zeros((1, rep.rank), dtype=np.int64)
        for _ in range(n):
            sums = (sums[:, None, :] + wrows[None, :, :]).reshape(-1, rep.rank)
        mask = np.all(sums == 0, axis=1).astype(np.complex128)
        sp = power_space(space(("V", d)), n)
        return Operator(sp, np.diag(mask))

    members = [np.asarray(g, dtype=np.complex128) for g in rep_or_group]
    if not members:
        raise ValueError("empty group")
    d = members[0].shape[0]
    for g in members:
        if g.shape != (d, d):
            raise ValueError("group matrices must share one square shape")
    for g, h in itertools.product(members, members):
        if not _match_member(g @ h, members):
            raise ValueError("matrix set is not closed under products")
    if d ** n > budget.dense_dim:
        raise ResourceBudgetError(
            f"projector dimension {d}^{n} exceeds the dense budget {budget.dense_dim}")
    total = np.zeros((d ** n, d ** n), dtype=np.complex128)
    for g in members:
        power = np.array([[1.0]], dtype=np.complex128)
        for _ in range(n):
            power = np.kron(power, g)
        total += power
    total /= len(members)
    if np.max(np.abs(total @ total - total)) > 1e-8:
        raise ArithmeticError("group average is not idempotent")
    sp = power_space(space(("V", d)), n)
    return Operator(sp, total)


# ---------------------------------------------------------------------------
# Occasionality probe


@dataclass(frozen=True)
class OccasionalityTable:
    rows: tuple[tuple[int, float, float], ...]
    exponent: int
    verdict: str


def _weight_zero_mass(probs: np.ndarray, wrows: np.ndarray, n: int) -> float:
    """P(sum of n iid coordinate weights = 0) for letter distribution probs."""
    d = len(probs)
    if math.comb(n + d - 1, d - 1) > 5_000_000:
        raise ResourceBudgetError(f"too many count vectors at n={n}, d={d}")
    log_probs = [math.log(p) if p > 0 else -math.inf for p in probs]

    def walk(i: int, left: int, wsum: np.ndarray, logp: float, acc: list[float]):
        if i == d - 1:
            k = left
            if probs[i] == 0.0 and k > 0:
                return
            if np.any(wsum + k * wrows[i] != 0):
                return
            acc.append(logp + (k * log_probs[i] if k else 0.0) - math.lgamma(k + 1))
            return
        top = left if probs[i] > 0.0 else 0
        for k in range(top + 1):
            walk(i + 1, left - k, wsum + k * wrows[i],
                 logp + (k * log_probs[i] if k else 0.0) - math.lgamma(k + 1), acc)

    acc: list[float] = []
    walk(0, n, np.zeros(wrows.shape[1], dtype=np.int64), math.lgamma(n + 1), acc)
    if not acc:
        return 0.0
    peak = max(acc)
    return math.exp(peak) * sum(math.exp(a - peak) for a in acc)


def occasionality_probe(rep: TorusRep, psi, n_list: Sequence[int],
                        tol_grad: float = 1e-8) -> OccasionalityTable:
    """Decay profile of p_n = Tr(P_psi^{(x)n} . fixed-subspace projector).

    When the moment map of psi vanishes the sequence decays only
    polynomially and the scaled column n^{c/2} p_n stays bounded, with c the
    dimension spanned by the supported weights; otherwise the probe reports
    the exponential-decay regime.
    """
    vec = _as_vector(rep, psi)
    norm = np.linalg.norm(vec)
    if norm <= 0:
        raise ValueError("state must be nonzero")
    vec = vec / norm
    probs = np.abs(vec) ** 2
    wrows = rep.coordinate_weights()
    supported = wrows[probs > 1e-15]
    exponent = int(np.linalg.matrix_rank(supported)) if len(supported) else 0
    mu = moment_map(rep, vec)
    verdict = "OCCASIONAL" if np.linalg.norm(mu) <= tol_grad else "EXPONENTIAL_DECAY"
    rows = []
    for n in n_list:
        p = _weight_zero_mass(probs, wrows, int(n))
        rows.append((int(n), p, n ** (exponent / 2) * p))
    return OccasionalityTable(tuple(rows), exponent, verdict)


__all__ = [
    "CapacityResult", "HullResult", "OccasionalityTable", "TorusRep",
    "capacity", "fixed_subspace_projector", "hull_membership", "kempf_ness",
    "moment_map", "occasionality_probe", "torus_rep",
]
