"""Extraction of the hidden deterministic relation between sub-processes.

Given a validated model with m shock channels, any m rows of C whose
product with B is invertible can serve as the driving channels u; the
remaining rows become the driven channels y. Each admissible selection
induces the matrix ``Gamma = A - B (C0 B)^{-1} C0 A`` and an exact
rational map F(s) from u to y, realized as

    F(s) = C1 B (C0 B)^{-1} + C1 Gamma (sI - Gamma)^{-1} B (C0 B)^{-1},

equivalently ``s C1 (sI - Gamma)^{-1} B (C0 B)^{-1}``. The zero
eigenvalues of Gamma cancel in the reduction, so the minimal degree is
at most n - m. Whether a selection with strictly stable F exists is a
property of the model, not a given: some models admit none.
"""

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import (
    InadmissibleSelection,
    NoAdmissibleSelection,
    SelectionLimitExceeded,
)
from .kernels import DEFAULT_TOL, Tolerances, is_invertible, numerical_rank
from .lti import (
    CtModel,
    StateSpace,
    is_strictly_stable,
    minimal_realization,
    poles,
)

__all__ = [
    "SELECTION_CAP",
    "RowSelection",
    "RelationReport",
    "enumerate_selections",
    "compute_gamma",
    "compute_F_raw",
    "compute_F",
    "classify_selection",
    "stable_selection_exists",
    "has_full_eigenbasis",
]

#: Hard cap on the number of row subsets enumerated.
SELECTION_CAP = 10_000


@dataclass
class RowSelection:
    """Choice of driving rows: ``rows0`` index the m rows of C forming
    C0 (the u-channels), ``rows1`` the complementary rows forming C1."""

    rows0: tuple[int, ...]
    rows1: tuple[int, ...]

    def __post_init__(self):
        self.rows0 = tuple(int(i) for i in self.rows0)
        self.rows1 = tuple(int(i) for i in self.rows1)
        if not self.rows0:
            raise ValueError("rows0 must select at least one row")
        if set(self.rows0) & set(self.rows1):
            raise ValueError("rows0 and rows1 must be disjoint")


@dataclass
class RelationReport:
    """Everything a selection yields: Gamma and its spectrum, the raw
    dimension-n realization, the minimal realization, the degree, and
    the stability verdict. An unstable F means the configuration only
    exists inside a stabilizing feedback loop; a stable F means the
    plain causal map exists with no feedback."""

    selection: RowSelection
    gamma: np.ndarray
    gamma_eigs: np.ndarray
    F: StateSpace
    F_raw: StateSpace
    degree: int
    stable: bool
    poles: np.ndarray


def _split_c(model: CtModel, sel: RowSelection):
    c = model.C
    n_out = model.n_out
    for idx in sel.rows0 + sel.rows1:
        if not 0 <= idx < n_out:
            raise InadmissibleSelection(f"row index {idx} out of range 0..{n_out - 1}")
    return c[list(sel.rows0), :], c[list(sel.rows1), :]


def _check_admissible(model: CtModel, sel: RowSelection) -> np.ndarray:
    c0, _ = _split_c(model, sel)
    if len(sel.rows0) != model.m:
        raise InadmissibleSelection(
            f"selection picks {len(sel.rows0)} rows, model needs m = {model.m}")
    c0b = c0 @ model.B
    if not is_invertible(c0b):
        raise InadmissibleSelection(
            f"C0 B for rows {sel.rows0} is not numerically invertible")
    return c0b


def enumerate_selections(
    model: CtModel,
    tol: Tolerances = DEFAULT_TOL,
    cap: int = SELECTION_CAP,
) -> list[RowSelection]:
    """All admissible selections, in lexicographic order of ``rows0``.

    A subset is admissible when its C0 B has condition number below the
    invertibility ceiling.

    Raises
    ------
    SelectionLimitExceeded
        More than ``cap`` subsets would have to be examined.
    NoAdmissibleSelection
        Every subset fails the invertibility test.
    """
    n_out, m = model.n_out, model.m
    if comb(n_out, m) > cap:
        raise SelectionLimitExceeded(
            f"{comb(n_out, m)} candidate subsets exceed the cap of {cap}")
    out = []
    for rows0 in itertools.combinations(range(n_out), m):
        c0b = model.C[list(rows0), :] @ model.B
        if is_invertible(c0b):
            rows1 = tuple(i for i in range(n_out) if i not in rows0)
            out.append(RowSelection(rows0=rows0, rows1=rows1))
    if not out:
        raise NoAdmissibleSelection("no row subset gives an invertible C0 B")
    return out


def compute_gamma(model: CtModel, sel: RowSelection, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``Gamma = A - B (C0 B)^{-1} C0 A`` for the given selection.

    Since ``B (C0 B)^{-1} C0`` is an (always diagonalizable) oblique
    projection with trace m, Gamma has rank n - m with at least m zero
    eigenvalues; its nonzero eigenvalues are the candidate poles of F.
    """
    c0b = _check_admissible(model, sel)
    c0, _ = _split_c(model, sel)
    x = np.linalg.solve(c0b, c0 @ model.A)
    gamma = model.A - model.B @ x
    # when m = n the projection is the identity and Gamma vanishes in
    # exact arithmetic; snap the all-cancellation case to a true zero so
    # rank and degree decisions downstream are not fooled by noise
    noise_floor = tol.rank_rtol * model.n * np.linalg.norm(model.A, 2)
    if np.linalg.norm(gamma, 2) <= noise_floor:
        gamma = np.zeros_like(gamma)
    return gamma


def compute_F_raw(model: CtModel, sel: RowSelection, tol: Tolerances = DEFAULT_TOL) -> StateSpace:
    """Dimension-n realization of F(s), prior to degree reduction."""
    c0b = _check_admissible(model, sel)
    _, c1 = _split_c(model, sel)
    gamma = compute_gamma(model, sel, tol)
    k = np.linalg.solve(c0b.T, model.B.T).T  # B (C0 B)^{-1}
    return StateSpace(gamma, k, c1 @ gamma, c1 @ k)


def compute_F(model: CtModel, sel: RowSelection, tol: Tolerances = DEFAULT_TOL) -> StateSpace:
    """Minimal realization of the deterministic relation F(s)."""
    return minimal_realization(compute_F_raw(model, sel, tol), tol)


def classify_selection(model: CtModel, sel: RowSelection, tol: Tolerances = DEFAULT_TOL) -> RelationReport:
    """Full report for one admissible selection."""
    gamma = compute_gamma(model, sel, tol)
    f_raw = compute_F_raw(model, sel, tol)
    f_min = minimal_realization(f_raw, tol)
    gamma_eigs = np.array(
        sorted(np.linalg.eigvals(gamma), key=lambda z: (z.real, z.imag)),
        dtype=np.complex128)
    f_poles = poles(f_min, tol)
    return RelationReport(
        selection=sel,
        gamma=gamma,
        gamma_eigs=gamma_eigs,
        F=f_min,
        F_raw=f_raw,
        degree=f_min.n,
        stable=is_strictly_stable(f_min, tol),
        poles=f_poles,
    )


def stable_selection_exists(model: CtModel, tol: Tolerances = DEFAULT_TOL) -> RowSelection | None:
    """First (lexicographic) selection whose F is strictly stable, or
    None when every admissible selection yields an unstable relation."""
    for sel in enumerate_selections(model, tol):
        if is_strictly_stable(compute_F(model, sel, tol), tol):
            return sel
    return None


def has_full_eigenbasis(m, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Numerical test that a square matrix has n independent
    eigenvectors (eigenvector-matrix rank at the rank tolerance)."""
    a = np.atleast_2d(np.asarray(m, dtype=float))
    _, vecs = np.linalg.eig(a)
    return numerical_rank(vecs, tol) == a.shape[0]
