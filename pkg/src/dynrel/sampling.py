"""Exact discretization at a fixed period and the inverse procedure.

Sampling a continuous model (A, B, C) with period h gives the discrete
triple ``A_d = exp(A h)``, ``C_d = C`` and noise intensity

    Q_d = B_d B_d' = integral_0^h exp(A s) B B' exp(A' s) ds,

computed here in closed form from one block matrix exponential. For a
reachable model Q_d is positive definite for every h, regardless of the
rank of B B': sampling hides rank deficiency of the continuous noise.
The same state covariance P solves both the continuous and the discrete
Lyapunov equations, which is the consistency check behind the inverse.

De-sampling inverts the map when three conditions hold: (i) A_d admits
a principal logarithm, (ii) Q_d is nonsingular, (iii) with
``A = log(A_d)/h`` and P solving the discrete equation, ``A P + P A'``
is negative semidefinite. Then B is recovered as a full-column-rank
factor of ``-(A P + P A')``, restoring any hidden rank deficiency; B is
unique only up to a right orthogonal factor, so only B B' is
contractual.
"""

import numpy as np
from dataclasses import dataclass

from .errors import (
    ExistenceFailure,
    LogFailure,
    NonPositiveH,
    NotSemidefinite,
    QdSingular,
    SingularInput,
)
from .kernels import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    matrix_exp,
    matrix_log_principal,
    numerical_rank,
    psd_factor,
    solve_lyap_continuous,
    solve_lyap_discrete,
)
from .lti import CtModel, StateSpace, validate_ct_model

__all__ = [
    "SampledModel",
    "DesampleDiagnostics",
    "HiddenRankReport",
    "sample",
    "dual_lyapunov_check",
    "desample",
    "hidden_rank_report",
]


@dataclass
class SampledModel:
    """Discrete-time triple with period h and cached noise intensity
    ``Qd = Bd Bd'``."""

    Ad: np.ndarray
    Bd: np.ndarray
    Cd: np.ndarray
    h: float
    Qd: np.ndarray

    def __post_init__(self):
        self.Ad = as_matrix(self.Ad, square=True, name="Ad")
        self.Bd = as_matrix(self.Bd, name="Bd")
        self.Cd = as_matrix(self.Cd, name="Cd")
        self.Qd = as_matrix(self.Qd, square=True, name="Qd")
        n = self.Ad.shape[0]
        if self.Bd.shape[0] != n or self.Cd.shape[1] != n or self.Qd.shape[0] != n:
            raise ValueError("Ad, Bd, Cd, Qd dimensions are inconsistent")
        self.h = float(self.h)
        if not (np.isfinite(self.h) and self.h > 0):
            raise NonPositiveH(f"sampling period must be positive, got {self.h}")

    @property
    def n(self) -> int:
        return self.Ad.shape[0]

    @classmethod
    def from_factor(cls, Ad, Bd, Cd, h: float) -> "SampledModel":
        bd = as_matrix(Bd, name="Bd")
        return cls(Ad=Ad, Bd=bd, Cd=Cd, h=h, Qd=bd @ bd.conj().T)

    @classmethod
    def from_intensity(
        cls, Ad, Qd, Cd, h: float, tol: Tolerances = DEFAULT_TOL
    ) -> "SampledModel":
        qd = as_matrix(Qd, square=True, name="Qd")
        return cls(Ad=Ad, Bd=psd_factor(qd, tol), Cd=Cd, h=h, Qd=qd)


@dataclass
class DesampleDiagnostics:
    """Condition checks of the inverse procedure. De-sampling succeeds
    iff all three booleans are true; ``residuals`` holds the relative
    residual pair (continuous, discrete) of the shared covariance, and
    ``recovered_rank`` the column count of the recovered B."""

    logm_exists: bool
    qd_nonsingular: bool
    neg_semidef_ok: bool
    residuals: tuple[float, float] | None = None
    recovered_rank: int = 0


@dataclass
class HiddenRankReport:
    """Rank bookkeeping across one sample/de-sample round trip."""

    n: int
    bbt_rank: int
    qd_rank: int
    recovered_rank: int


def sample(model: CtModel, h: float, tol: Tolerances = DEFAULT_TOL) -> SampledModel:
    """Exact discretization of a validated model at period ``h``.

    ``A_d`` and ``Q_d`` come from one exponential of the block matrix
    ``[[A, B B'], [0, -A']] * h``: with the result partitioned as
    ``[[E11, E12], [0, E22]]``, ``A_d = E11`` and ``Q_d = E12 E11'``.
    This is exact to kernel accuracy with no step-size tuning.
    """
    if not (np.isfinite(h) and h > 0):
        raise NonPositiveH(f"sampling period must be positive, got {h}")
    a, b, c = model.A, model.B, model.C
    n = model.n
    bbt = b @ b.T
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = a
    block[:n, n:] = bbt
    block[n:, n:] = -a.T
    big = matrix_exp(block, h)
    a_d = big[:n, :n]
    q_d = big[:n, n:] @ a_d.T
    q_d = 0.5 * (q_d + q_d.T)
    b_d = psd_factor(q_d, tol)
    return SampledModel(Ad=a_d, Bd=b_d, Cd=c.copy(), h=float(h), Qd=q_d)


def dual_lyapunov_check(
    model: CtModel, sm: SampledModel, tol: Tolerances = DEFAULT_TOL
) -> tuple[float, float]:
    """Relative residuals of the single state covariance P in both the
    continuous equation ``A P + P A' + B B' = 0`` and the discrete one
    ``P = A_d P A_d' + Q_d``. Both stay below ``residual_tol`` when
    ``sm`` really is a sampling of ``model``."""
    bbt = model.B @ model.B.T
    p = solve_lyap_continuous(model.A, bbt, tol)
    r_cont = np.linalg.norm(model.A @ p + p @ model.A.T + bbt, 2) / np.linalg.norm(bbt, 2)
    r_disc = np.linalg.norm(p - sm.Ad @ p @ sm.Ad.T - sm.Qd, 2) / np.linalg.norm(sm.Qd, 2)
    return float(r_cont), float(r_disc)


def desample(
    sm: SampledModel, tol: Tolerances = DEFAULT_TOL
) -> tuple[CtModel, DesampleDiagnostics]:
    """Recover the continuous model behind a sampled triple.

    Checks the three existence conditions in order and raises the error
    naming the first one that fails; the partial diagnostics are
    attached to the exception as ``.diagnostics``. On success the
    returned model passes full validation, and the recovered B has as
    many columns as the true continuous noise rank.

    Raises
    ------
    LogFailure
        Condition (i): no principal logarithm of ``A_d``.
    QdSingular
        Condition (ii): ``Q_d`` numerically singular. A triple whose
        noise intensity is rank deficient cannot come from sampling a
        reachable continuous model.
    NotSemidefinite
        Condition (iii): ``A P + P A'`` has a significantly positive
        eigenvalue.
    """
    diag = DesampleDiagnostics(logm_exists=False, qd_nonsingular=False,
                               neg_semidef_ok=False)
    try:
        log_ad = matrix_log_principal(sm.Ad, tol)
    except (ExistenceFailure, SingularInput) as exc:
        err = LogFailure(f"A_d admits no principal logarithm: {exc}")
        err.diagnostics = diag
        raise err from exc
    diag.logm_exists = True
    a = log_ad / sm.h

    w = np.linalg.eigvalsh(0.5 * (sm.Qd + sm.Qd.T))
    if w.max() <= 0 or w.min() <= tol.psd_tol * w.max():
        err = QdSingular(
            "Q_d is numerically singular; the triple cannot arise from "
            "sampling a reachable model")
        err.diagnostics = diag
        raise err
    diag.qd_nonsingular = True

    p = solve_lyap_discrete(sm.Ad, sm.Qd, tol)
    candidate = a @ p + p @ a.T
    candidate = 0.5 * (candidate + candidate.T)
    eigs = np.linalg.eigvalsh(candidate)
    scale = float(np.abs(eigs).max())
    if scale > 0 and eigs.max() > tol.psd_tol * scale:
        err = NotSemidefinite(
            f"A P + P A' has positive eigenvalue {eigs.max():.6g}; "
            "condition (iii) fails")
        err.diagnostics = diag
        raise err
    diag.neg_semidef_ok = True

    b = psd_factor(-candidate, tol)
    bbt = b @ b.T
    r_cont = np.linalg.norm(a @ p + p @ a.T + bbt, 2) / max(np.linalg.norm(bbt, 2), 1e-300)
    r_disc = np.linalg.norm(p - sm.Ad @ p @ sm.Ad.T - sm.Qd, 2) / np.linalg.norm(sm.Qd, 2)
    diag.residuals = (float(r_cont), float(r_disc))
    diag.recovered_rank = b.shape[1]
    model = validate_ct_model(StateSpace(a, b, sm.Cd.copy()), tol)
    return model, diag


def hidden_rank_report(model: CtModel, h: float, tol: Tolerances = DEFAULT_TOL) -> HiddenRankReport:
    """Rank bookkeeping for one round trip: the continuous noise rank,
    the (full) rank of the sampled intensity, and the rank recovered by
    de-sampling."""
    bbt_rank = numerical_rank(model.B @ model.B.T, tol)
    sm = sample(model, h, tol)
    qd_rank = numerical_rank(sm.Qd, tol)
    _, diag = desample(sm, tol)
    return HiddenRankReport(
        n=model.n,
        bbt_rank=bbt_rank,
        qd_rank=qd_rank,
        recovered_rank=diag.recovered_rank,
    )
