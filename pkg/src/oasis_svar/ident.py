"""Identification of structural shocks u = A′ε with A′ΣA = I.

Schemes: OASIS (equal or weighted maximum correlation), Cholesky under an
arbitrary variable ordering, and the sequential constrained maximisation
that Cholesky solves implicitly. Also the cross-scheme quantities used in
the study tables: rotations, shock-to-shock correlations, permutation
scans over orderings and the proximity diagnostics.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidPermutation,
    NonpositiveWeight,
    NotInFeasibleSet,
    RhoOutOfRange,
    SingularMatrix,
)
from .matprim import (
    EPS,
    CovLike,
    as_cov,
    cholesky_lower,
    corr_from_cov,
    sym_inv_sqrt,
)

FEASIBILITY_TOL = 1e-6
DEFAULT_SCAN_BUDGET = 5_040_000
SUBSET_DP_MAX_N = 16


@dataclass(frozen=True)
class IdentificationResult:
    scheme: str
    A: np.ndarray
    B: np.ndarray
    per_shock_corr: np.ndarray
    avg_corr: float
    ordering: Optional[tuple] = None
    weights: Optional[np.ndarray] = None
    objective: Optional[float] = None  # weighted objective Σ w_i corr(u_i, ε_i)

    @property
    def n(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class Diagnostics:
    d_C: float
    abs_corr_mean: float
    rho_star: float
    rho_chol: float
    proximity_ratio: Optional[float]  # None when 1 - rho_star is zero
    approx_star: float
    approx_chol: float
    ordering: tuple = ()


@dataclass(frozen=True)
class ScanResult:
    min_corr: float
    max_corr: float
    argmin: tuple
    argmax: tuple
    exhaustive: bool
    method: str
    evaluated: int


def _weights(w, n: int) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    if w.shape[0] != n:
        raise DimensionMismatch(f"{w.shape[0]} weights for {n} variables")
    if not np.all(w > 0):
        raise NonpositiveWeight("all weights must be strictly positive")
    return w


def check_ordering(ordering: Sequence[int], n: int) -> tuple:
    try:
        ordering = tuple(int(i) for i in ordering)
    except (TypeError, ValueError):
        raise InvalidPermutation(f"ordering {ordering!r} is not a sequence of indices") from None
    if sorted(ordering) != list(range(n)):
        raise InvalidPermutation(f"ordering {ordering} is not a permutation of 0..{n - 1}")
    return ordering


def feasibility_gap(A, sigma: CovLike) -> float:
    S = as_cov(sigma).values
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != S.shape[0]:
        raise DimensionMismatch(f"A shape {A.shape} does not match Σ of size {S.shape[0]}")
    return float(np.linalg.norm(A.T @ S @ A - np.eye(A.shape[1])))


def _require_feasible(A, sigma, tol: float = FEASIBILITY_TOL) -> None:
    gap = feasibility_gap(A, sigma)
    if not gap <= tol:
        raise NotInFeasibleSet(f"‖A′ΣA − I‖_F = {gap:.3e} exceeds {tol:.0e}")


def shock_correlations(A, sigma: CovLike) -> np.ndarray:
    """corr(u_i, ε_i) for u = A′ε, i.e. diag(A′Σ) / σ."""
    S = as_cov(sigma).values
    A = np.asarray(A, dtype=np.float64)
    return np.einsum("ij,ji->i", A.T, S) / np.sqrt(np.diag(S))


def _result(scheme, A, sigma, ordering=None, weights=None) -> IdentificationResult:
    S = as_cov(sigma).values
    corr = shock_correlations(A, S)
    obj = float(np.dot(weights, corr)) if weights is not None else None
    return IdentificationResult(
        scheme=scheme,
        A=A,
        B=np.linalg.inv(A).T,
        per_shock_corr=corr,
        avg_corr=float(np.mean(corr)),
        ordering=ordering,
        weights=weights,
        objective=obj,
    )


def oasis(sigma: CovLike) -> IdentificationResult:
    """OASIS: A* = Λ_σ⁻¹ C^{-1/2}, the unique maximiser of the average correlation."""
    cs = corr_from_cov(sigma)
    A = sym_inv_sqrt(cs.C) / cs.sigma[:, None]
    return _result("oasis", A, sigma)


def weighted_oasis(sigma: CovLike, w) -> IdentificationResult:
    """A* = Λ_σ⁻¹ Λ_w (Λ_w C Λ_w)^{-1/2}; maximises Σ w_i corr(u_i, ε_i)."""
    cs = corr_from_cov(sigma)
    w = _weights(w, cs.n)
    K = cs.C * np.outer(w, w)
    A = (w / cs.sigma)[:, None] * sym_inv_sqrt(K)
    return _result("weighted_oasis", A, sigma, weights=w)


def cholesky_id(sigma: CovLike, ordering: Optional[Sequence[int]] = None) -> IdentificationResult:
    """Recursive identification with variables placed in ``ordering``.

    ``ordering[k]`` is the (0-based) original index of the variable placed
    k-th. The returned A is expressed in the original variable positions, so
    column i of A produces the shock associated with variable i.
    """
    S = as_cov(sigma).values
    n = S.shape[0]
    ordering = tuple(range(n)) if ordering is None else check_ordering(ordering, n)
    idx = np.array(ordering)
    L = cholesky_lower(S[np.ix_(idx, idx)])
    A_perm = np.linalg.inv(L).T
    A = np.empty_like(A_perm)
    A[np.ix_(idx, idx)] = A_perm
    return _result("cholesky", A, S, ordering=ordering)


def sequential_max_corr(sigma: CovLike) -> IdentificationResult:
    """Solve the constrained problems column by column.

    Column j maximises corr(a′ε, ε_j) = a′Σe_j / σ_j over a′Σa = 1 with a
    Σ-orthogonal to all earlier columns. In the Σ inner product the objective
    is ⟨a, e_j⟩, so the maximiser is e_j with its projection on the earlier
    columns removed, normalised to unit Σ-length.
    """
    S = as_cov(sigma).values
    n = S.shape[0]
    A = np.zeros((n, n))
    for j in range(n):
        a = np.zeros(n)
        a[j] = 1.0
        for i in range(j):
            a -= (A[:, i] @ S @ a) * A[:, i]
        norm = math.sqrt(a @ S @ a)
        A[:, j] = a / norm
    return _result("sequential_max_corr", A, S, ordering=tuple(range(n)))


def avg_corr(A, sigma: CovLike, w=None) -> tuple[float, np.ndarray]:
    """Objective value and per-shock correlations diag(A′Λ_σC).

    Without weights the value is the plain average; with weights it is
    Σ w_i corr(u_i, ε_i).
    """
    _require_feasible(A, sigma)
    corr = shock_correlations(A, sigma)
    if w is None:
        return float(np.mean(corr)), corr
    return float(np.dot(_weights(w, corr.shape[0]), corr)), corr


def rotation_between(A1, A2) -> np.ndarray:
    """R = A1⁻¹A2, so that u2 = R′u1."""
    A1 = np.asarray(A1, dtype=np.float64)
    A2 = np.asarray(A2, dtype=np.float64)
    if A1.shape != A2.shape or A1.ndim != 2 or A1.shape[0] != A1.shape[1]:
        raise DimensionMismatch(f"incompatible shapes {A1.shape} and {A2.shape}")
    if np.linalg.cond(A1) > 1 / EPS:
        raise SingularMatrix("first identification matrix is singular")
    return np.linalg.solve(A1, A2)


def cross_scheme_corr(A1, A2, sigma: CovLike) -> float:
    """Average of corr(u1_i, u2_i) = mean diag(A1′ΣA2)."""
    _require_feasible(A1, sigma)
    _require_feasible(A2, sigma)
    S = as_cov(sigma).values
    return float(np.mean(np.diag(np.asarray(A1).T @ S @ np.asarray(A2))))


def equicorr_closed_forms(n: int, rho: float) -> tuple[float, float]:
    """(ρ̄*, ρ̄_c) for an n-dimensional equicorrelation matrix."""
    if n < 1:
        raise RhoOutOfRange(f"dimension must be positive, got {n}")
    lower = -1.0 / (n - 1) if n > 1 else -math.inf
    if not lower < rho < 1.0:
        raise RhoOutOfRange(f"rho={rho} outside ({lower}, 1) for n={n}")
    rho_star = math.sqrt(1 + (n - 1) * rho) / n + math.sqrt(1 - rho) * (1 - 1 / n)
    rho_c = sum(math.sqrt(1 - (k - 1) * rho**2 / ((k - 2) * rho + 1)) for k in range(1, n + 1)) / n
    return rho_star, rho_c


def d_of_c(C: np.ndarray) -> float:
    n = C.shape[0]
    E = C - np.eye(n)
    return float(np.sum(E * E) / n)


def diagnostics(sigma: CovLike, ordering: Optional[Sequence[int]] = None) -> Diagnostics:
    cs = corr_from_cov(sigma)
    n = cs.n
    d = d_of_c(cs.C)
    off = ~np.eye(n, dtype=bool)
    abs_mean = float(np.mean(np.abs(cs.C[off]))) if n > 1 else 0.0
    rho_star = float(np.mean(np.sqrt(cs.eigvalues)))
    chol = cholesky_id(sigma, ordering)
    gap = 1.0 - rho_star
    ratio = (1.0 - chol.avg_corr) / gap if gap > 16 * EPS else None
    return Diagnostics(
        d_C=d,
        abs_corr_mean=abs_mean,
        rho_star=rho_star,
        rho_chol=chol.avg_corr,
        proximity_ratio=ratio,
        approx_star=1 - d / 8,
        approx_chol=1 - d / 4,
        ordering=chol.ordering,
    )


@dataclass(frozen=True)
class EigenDownscale:
    M: np.ndarray
    lam_sqrt: np.ndarray
    reconstruction: float  # Σ M_ii λ_i^{1/2} = n ρ̄(A)


def eigen_downscale_decomposition(A, sigma: CovLike) -> EigenDownscale:
    """M = Q′R′Q with R = A*⁻¹A, so that Σ M_ii λ_i^{1/2} reproduces ρ(A)."""
    _require_feasible(A, sigma)
    cs = corr_from_cov(sigma)
    R = rotation_between(oasis(sigma).A, A)
    Q = cs.eigvectors
    M = Q.T @ R.T @ Q
    lam_sqrt = np.sqrt(cs.eigvalues)
    return EigenDownscale(M=M, lam_sqrt=lam_sqrt, reconstruction=float(np.diag(M) @ lam_sqrt))


# -- permutation scan -------------------------------------------------------


def _chol_avg_batch(C: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """Average Cholesky correlation (trace of L / n) for a batch of orderings."""
    Cp = C[perms[:, :, None], perms[:, None, :]]
    L = np.linalg.cholesky(Cp)
    return np.trace(L, axis1=1, axis2=2) / C.shape[0]


def _scan_enumerate(C: np.ndarray, chunk: int = 20_000) -> ScanResult:
    n = C.shape[0]
    best_min, best_max = math.inf, -math.inf
    arg_min = arg_max = None
    count = 0
    it = itertools.permutations(range(n))
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            break
        perms = np.array(block, dtype=np.intp)
        vals = _chol_avg_batch(C, perms)
        # itertools yields lexicographic order, so the first extreme in a block
        # and a strict comparison across blocks give the smallest tied ordering
        i, j = int(np.argmin(vals)), int(np.argmax(vals))
        if vals[i] < best_min:
            best_min, arg_min = float(vals[i]), tuple(block[i])
        if vals[j] > best_max:
            best_max, arg_max = float(vals[j]), tuple(block[j])
        count += len(block)
    return ScanResult(best_min, best_max, arg_min, arg_max, True, "enumerate", count)


def _conditional_sd_table(C: np.ndarray) -> np.ndarray:
    """table[S, j] = sd of η_j given η_S for every subset bitmask S and j ∉ S."""
    n = C.shape[0]
    table = np.full((1 << n, n), np.nan)
    table[0] = 1.0
    by_size = [[] for _ in range(n + 1)]
    for mask in range(1, 1 << n):
        by_size[bin(mask).count("1")].append(mask)
    for k in range(1, n):
        masks = np.array(by_size[k])
        members = np.array([[i for i in range(n) if m >> i & 1] for m in masks])
        C_ss = C[members[:, :, None], members[:, None, :]]
        C_sa = C[members]  # (m, k, n)
        coef = np.linalg.solve(C_ss, C_sa)
        var = 1.0 - np.einsum("mkj,mkj->mj", C_sa, coef)
        sd = np.sqrt(np.clip(var, 0.0, None))
        inside = np.zeros((len(masks), n), dtype=bool)
        np.put_along_axis(inside, members, True, axis=1)
        sd[inside] = np.nan
        table[masks] = sd
    return table


def _scan_subset_dp(C: np.ndarray) -> ScanResult:
    """Exact extremes over all n! orderings by dynamic programming on subsets.

    The k-th Cholesky diagonal depends only on which variables precede it,
    not on their order, so the best completion from a placed set S is
    independent of how S was reached.
    """
    n = C.shape[0]
    full = (1 << n) - 1
    sd = _conditional_sd_table(C)
    masks = np.arange(1 << n)
    popcount = np.array([bin(m).count("1") for m in range(1 << n)])
    bits = 1 << np.arange(n)
    out = {}
    for sense in ("min", "max"):
        value = np.zeros(1 << n)
        choice = np.full(1 << n, -1, dtype=np.intp)
        for k in range(n - 1, -1, -1):
            level = masks[popcount == k]
            cand = sd[level] + value[level[:, None] | bits]
            inside = (level[:, None] & bits) != 0
            cand[inside] = np.inf if sense == "min" else -np.inf
            # argmin/argmax return the first extreme: smallest next variable on ties
            pick = np.argmin(cand, axis=1) if sense == "min" else np.argmax(cand, axis=1)
            value[level] = cand[np.arange(len(level)), pick]
            choice[level] = pick
        order, mask = [], 0
        while mask != full:
            j = int(choice[mask])
            order.append(j)
            mask |= 1 << j
        perm = np.array([order], dtype=np.intp)
        out[sense] = (float(_chol_avg_batch(C, perm)[0]), tuple(order))
    return ScanResult(
        out["min"][0], out["max"][0], out["min"][1], out["max"][1], True, "subset_dp", n << n
    )


def _greedy_ordering(C: np.ndarray, maximize: bool) -> tuple:
    n = C.shape[0]
    order: list = []
    for _ in range(n):
        rest = [j for j in range(n) if j not in order]
        if order:
            S = np.array(order)
            coef = np.linalg.solve(C[np.ix_(S, S)], C[np.ix_(S, rest)])
            var = 1.0 - np.einsum("kj,kj->j", C[np.ix_(S, rest)], coef)
        else:
            var = np.ones(len(rest))
        k = int(np.argmax(var) if maximize else np.argmin(var))
        order.append(rest[k])
    return tuple(order)


def _scan_sample(C: np.ndarray, budget: int, seed: int, chunk: int = 20_000) -> ScanResult:
    n = C.shape[0]
    rng = np.random.default_rng(seed)
    candidates = [_greedy_ordering(C, False), _greedy_ordering(C, True), tuple(range(n))]
    best_min, best_max = math.inf, -math.inf
    arg_min = arg_max = None

    def consider(perms: np.ndarray):
        nonlocal best_min, best_max, arg_min, arg_max
        vals = _chol_avg_batch(C, perms)
        for v, p in zip(vals, perms):
            p = tuple(int(x) for x in p)
            if v < best_min or (v == best_min and p < arg_min):
                best_min, arg_min = float(v), p
            if v > best_max or (v == best_max and p < arg_max):
                best_max, arg_max = float(v), p

    consider(np.array(candidates, dtype=np.intp))
    done = 0
    while done < budget:
        m = min(chunk, budget - done)
        perms = np.argsort(rng.random((m, n)), axis=1)
        consider(perms)
        done += m
    return ScanResult(best_min, best_max, arg_min, arg_max, False, "sample", done + len(candidates))


def permutation_scan(
    sigma: CovLike,
    budget: int = DEFAULT_SCAN_BUDGET,
    seed: int = 0,
    method: str = "auto",
) -> ScanResult:
    """Range of the average Cholesky correlation over variable orderings.

    ``method="auto"`` enumerates every ordering when n! fits in ``budget``,
    otherwise uses the exact subset recursion up to n = 16 and falls back to
    random sampling plus a greedy pass beyond that. Ties between orderings
    resolve to the lexicographically smallest one.
    """
    cs = corr_from_cov(sigma)
    n = cs.n
    if n < 2:
        raise DimensionMismatch("permutation scan needs at least two variables")
    if method == "auto":
        if math.factorial(n) <= budget:
            method = "enumerate"
        elif n <= SUBSET_DP_MAX_N:
            method = "subset_dp"
        else:
            method = "sample"
    if method == "enumerate":
        return _scan_enumerate(cs.C)
    if method == "subset_dp":
        return _scan_subset_dp(cs.C)
    if method == "sample":
        return _scan_sample(cs.C, budget, seed)
    raise ValueError(f"unknown scan method {method!r}")
