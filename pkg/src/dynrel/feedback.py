"""Closed-loop structure of a pair of coupled rational maps.

A forward map F (u to y) and a return map H (y to u), driven by two
noise sources, form the loop ``y = F u + v``, ``u = H y + r``. The
transfer matrix from (v, r) to (y, u) is

    T = [[P, P F], [Q H, Q]],   P = (I - F H)^{-1},  Q = (I - H F)^{-1},

with the interchange identities ``P F = F Q`` and ``H P = Q H``.
Stationarity of the driven processes forces T to be stable, which is
why an unstable F can only occur together with a nonzero stabilizing H.
On the prediction side: the past of u improves prediction of y exactly
when F is nonzero, and the loop is feedback-free exactly when H is
identically zero, in which case F must be strictly stable.
"""

import numpy as np
import scipy.linalg
from dataclasses import dataclass

from .errors import AlgebraicLoopSingular
from .kernels import DEFAULT_TOL, Tolerances, as_matrix, is_invertible
from .lti import StateSpace, is_strictly_stable, tf_eval
from .spectral import default_grid

__all__ = [
    "FeedbackModel",
    "ClosedLoop",
    "FeedbackFreeVerdict",
    "closed_loop_T",
    "internal_stability",
    "verify_interchange_identities",
    "granger_causes",
    "feedback_free",
]


@dataclass
class FeedbackModel:
    """Forward map F (p x q), return map H (q x p), and optional constant
    noise intensities for the two sources."""

    F: StateSpace
    H: StateSpace
    phi_v: np.ndarray | None = None
    phi_r: np.ndarray | None = None

    def __post_init__(self):
        p, q = self.F.n_out, self.F.n_in
        if (self.H.n_out, self.H.n_in) != (q, p):
            raise ValueError(
                f"H must be {q}x{p} to close the loop with a {p}x{q} F, "
                f"got {self.H.n_out}x{self.H.n_in}")
        if self.phi_v is not None:
            self.phi_v = as_matrix(self.phi_v, square=True, name="phi_v")
            if self.phi_v.shape[0] != p:
                raise ValueError(f"phi_v must be {p}x{p}")
        if self.phi_r is not None:
            self.phi_r = as_matrix(self.phi_r, square=True, name="phi_r")
            if self.phi_r.shape[0] != q:
                raise ValueError(f"phi_r must be {q}x{q}")

    @property
    def p(self) -> int:
        return self.F.n_out

    @property
    def q(self) -> int:
        return self.F.n_in


@dataclass
class ClosedLoop:
    """The four blocks of T plus the combined realization.

    Block realizations share the loop state (they are not reduced);
    their poles and stability verdicts go through minimal realizations
    downstream.
    """

    T: StateSpace
    P: StateSpace
    PF: StateSpace
    QH: StateSpace
    Q: StateSpace
    internally_stable: bool


def _subsystem(ss: StateSpace, rows, cols) -> StateSpace:
    return StateSpace(ss.A, ss.B[:, cols], ss.C[rows, :], ss.D[np.ix_(rows, cols)])


def closed_loop_T(fm: FeedbackModel, tol: Tolerances = DEFAULT_TOL) -> ClosedLoop:
    """Realize the closed-loop transfer matrix T by state-space
    interconnection of F and H.

    Well-posedness is decided on the feedthroughs: the static loop
    matrix ``[[I, -D_F], [-D_H, I]]`` must be numerically invertible.

    Raises
    ------
    AlgebraicLoopSingular
        The static loop matrix is numerically singular.
    """
    f, h = fm.F, fm.H
    p, q = fm.p, fm.q
    loop = np.block([
        [np.eye(p), -f.D],
        [-h.D, np.eye(q)],
    ])
    if not is_invertible(loop):
        raise AlgebraicLoopSingular(
            "I - D_F D_H is numerically singular; the loop is not well posed")
    loop_inv = np.linalg.inv(loop)
    a_open = scipy.linalg.block_diag(f.A, h.A)
    c_stack = np.block([
        [f.C, np.zeros((p, h.n))],
        [np.zeros((q, f.n)), h.C],
    ])
    b_mix = np.block([
        [np.zeros((f.n, p)), f.B],
        [h.B, np.zeros((h.n, q))],
    ])
    t = StateSpace(
        a_open + b_mix @ loop_inv @ c_stack,
        b_mix @ loop_inv,
        loop_inv @ c_stack,
        loop_inv,
    )
    y_rows = list(range(p))
    u_rows = list(range(p, p + q))
    v_cols = list(range(p))
    r_cols = list(range(p, p + q))
    blocks = {
        "P": _subsystem(t, y_rows, v_cols),
        "PF": _subsystem(t, y_rows, r_cols),
        "QH": _subsystem(t, u_rows, v_cols),
        "Q": _subsystem(t, u_rows, r_cols),
    }
    stable = all(is_strictly_stable(blk, tol) for blk in blocks.values())
    return ClosedLoop(T=t, internally_stable=stable, **blocks)


def internal_stability(fm: FeedbackModel, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff all four closed-loop blocks are strictly stable."""
    return closed_loop_T(fm, tol).internally_stable


def verify_interchange_identities(
    fm: FeedbackModel, grid=None, tol: Tolerances = DEFAULT_TOL
) -> float:
    """Largest residual of ``P F - F Q`` and ``H P - Q H`` over the grid
    of imaginary-axis frequencies (defaults to the package grid)."""
    cl = closed_loop_T(fm, tol)
    if grid is None:
        grid = default_grid()
    worst = 0.0
    for w in np.asarray(grid, dtype=float):
        s = 1j * w
        f_val = tf_eval(fm.F, s)
        h_val = tf_eval(fm.H, s)
        p_val = tf_eval(cl.P, s)
        q_val = tf_eval(cl.Q, s)
        worst = max(
            worst,
            float(np.linalg.norm(p_val @ f_val - f_val @ q_val, 2)),
            float(np.linalg.norm(h_val @ p_val - q_val @ h_val, 2)),
        )
    return worst


def granger_causes(F: StateSpace, tol: Tolerances = DEFAULT_TOL, grid=None) -> bool:
    """Whether the past of u improves linear prediction of y: true iff
    the forward map is nonzero, decided as a peak gain above
    ``residual_tol`` on the frequency grid."""
    if grid is None:
        grid = default_grid()
    peak = max(
        float(np.linalg.norm(tf_eval(F, 1j * w), 2)) for w in np.asarray(grid, dtype=float)
    )
    return peak > tol.residual_tol


@dataclass
class FeedbackFreeVerdict:
    """Outcome of the feedback-freeness test.

    ``h_zero`` reports whether the return map vanishes on the grid.
    When it does, ``f_stable`` records the stability check that
    stationarity then forces on F, and ``inconsistent`` flags the
    combination of a vanishing H with an unstable F.
    """

    h_zero: bool
    f_stable: bool | None
    inconsistent: bool


def feedback_free(
    H: StateSpace,
    F: StateSpace,
    tol: Tolerances = DEFAULT_TOL,
    grid=None,
) -> FeedbackFreeVerdict:
    """Test for absence of feedback (H identically zero) and, when it is
    absent, the consistency requirement that F be strictly stable."""
    if grid is None:
        grid = default_grid()
    peak = max(
        float(np.linalg.norm(tf_eval(H, 1j * w), 2)) for w in np.asarray(grid, dtype=float)
    )
    h_zero = peak <= tol.residual_tol
    if not h_zero:
        return FeedbackFreeVerdict(h_zero=False, f_stable=None, inconsistent=False)
    f_stable = is_strictly_stable(F, tol)
    return FeedbackFreeVerdict(h_zero=True, f_stable=f_stable, inconsistent=not f_stable)
