"""Bistable piecewise-linear flux, branch inverses, and entropy primitives.

The flux has three affine pieces: increasing outer branches
``phi1(u) = alpha1*u + gamma1`` on ``u <= b`` and ``phi2(u) = alpha2*u + gamma2``
on ``u >= c``, joined by the decreasing middle branch
``phi0(u) = (A*(u - b) - B*(u - c)) / (c - b)`` on ``b < u < c``.
The critical values ``A = phi2(c) < phi1(b) = B`` are where the branches meet,
and ``sigma = (c - b)/(A - B) < 0`` is the inverse slope of the middle branch.

Each branch has an affine inverse: ``beta1`` on v <= B, ``beta2`` on v >= A,
and the decreasing ``beta0`` on A <= v <= B.  The entropy machinery pairs a
nondecreasing ``g`` with its primitive ``G(u) = int_0^u g(phi(s)) ds``; the
pointwise admissibility certificate is the nonnegative quantity
``G(beta0(v)) - G(beta2(v)) + (beta2(v) - beta0(v)) * g(v)``.

All functions are pure and accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainViolationError

_CONSISTENCY_TOL = 1e-9


def _check_finite(values, what: str):
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainViolationError(f"{what} must be finite")
    return arr


def _scalar_like(template, arr: np.ndarray):
    return float(arr) if np.ndim(template) == 0 else arr


@dataclass(frozen=True)
class PhaseParams:
    """Scalar constants of the phase diagram.

    ``b < c`` are the breakpoints in state (u) space, ``A < B`` the critical
    values in flux (v) space, ``alpha1, alpha2 > 0`` the outer-branch slopes
    and ``gamma1, gamma2`` their intercepts.  Continuity forces
    ``alpha1*b + gamma1 = B`` and ``alpha2*c + gamma2 = A``.
    """

    b: float
    c: float
    A: float
    B: float
    alpha1: float
    alpha2: float
    gamma1: float
    gamma2: float

    def __post_init__(self):
        for name in ("b", "c", "A", "B", "alpha1", "alpha2", "gamma1", "gamma2"):
            if not np.isfinite(getattr(self, name)):
                raise DomainViolationError(f"PhaseParams.{name} must be finite")
        if not self.b < self.c:
            raise DomainViolationError("require b < c")
        if not self.A < self.B:
            raise DomainViolationError("require A < B")
        if self.alpha1 <= 0 or self.alpha2 <= 0:
            raise DomainViolationError("outer-branch slopes must be positive")
        scale = max(abs(self.A), abs(self.B), 1.0)
        if abs(self.alpha1 * self.b + self.gamma1 - self.B) > _CONSISTENCY_TOL * scale:
            raise DomainViolationError("continuity violated at u = b (alpha1*b + gamma1 != B)")
        if abs(self.alpha2 * self.c + self.gamma2 - self.A) > _CONSISTENCY_TOL * scale:
            raise DomainViolationError("continuity violated at u = c (alpha2*c + gamma2 != A)")

    @classmethod
    def from_critical_values(cls, b: float, c: float, A: float, B: float,
                             alpha1: float = 1.0, alpha2: float = 1.0) -> "PhaseParams":
        """Build params with intercepts forced by continuity at the breakpoints."""
        return cls(b=b, c=c, A=A, B=B, alpha1=alpha1, alpha2=alpha2,
                   gamma1=B - alpha1 * b, gamma2=A - alpha2 * c)

    @classmethod
    def default(cls) -> "PhaseParams":
        """Unit-coefficient diagram: b=-1, c=1, A=-1, B=1, so phi0(u) = -u."""
        return cls.from_critical_values(-1.0, 1.0, -1.0, 1.0)

    @property
    def sigma(self) -> float:
        """Inverse slope of the middle branch, (c-b)/(A-B) < 0."""
        return (self.c - self.b) / (self.A - self.B)

    @property
    def sigma_abs(self) -> float:
        return abs(self.sigma)

    @property
    def phi0_slope(self) -> float:
        return (self.A - self.B) / (self.c - self.b)

    @property
    def phi0_intercept(self) -> float:
        return self.B - self.phi0_slope * self.b


def eval_phi(params: PhaseParams, u):
    """Evaluate the piecewise-linear flux at ``u`` (scalar or array)."""
    arr = _check_finite(u, "flux argument")
    out = np.where(
        arr <= params.b,
        params.alpha1 * arr + params.gamma1,
        np.where(
            arr >= params.c,
            params.alpha2 * arr + params.gamma2,
            params.phi0_slope * arr + params.phi0_intercept,
        ),
    )
    return _scalar_like(u, out)


def beta0_extended(params: PhaseParams, v):
    """Affine continuation of the middle-branch inverse, no domain check.

    Coincides with beta0 on [A, B]; outside it is the analytic continuation
    used when assembling fields past the certified region.
    """
    arr = np.asarray(v, dtype=float)
    return _scalar_like(v, params.b + params.sigma * (arr - params.B))


def beta2_extended(params: PhaseParams, v):
    """Affine inverse of the upper stable branch, no domain check."""
    arr = np.asarray(v, dtype=float)
    return _scalar_like(v, (arr - params.gamma2) / params.alpha2)


def beta1_extended(params: PhaseParams, v):
    """Affine inverse of the lower stable branch, no domain check."""
    arr = np.asarray(v, dtype=float)
    return _scalar_like(v, (arr - params.gamma1) / params.alpha1)


def eval_beta(params: PhaseParams, branch: int, v):
    """Evaluate the inverse of one monotone branch of the flux.

    Branch 0 (decreasing) lives on A <= v <= B, branch 1 on v <= B and
    branch 2 on v >= A; closed endpoints are admitted by continuity.
    Values outside the branch domain raise ``DomainViolationError``.
    """
    arr = _check_finite(v, "branch-inverse argument")
    if branch == 0:
        if np.any(arr < params.A) or np.any(arr > params.B):
            raise DomainViolationError("branch 0 inverse requires A <= v <= B")
        return _scalar_like(v, params.b + params.sigma * (np.asarray(arr) - params.B))
    if branch == 1:
        if np.any(arr > params.B):
            raise DomainViolationError("branch 1 inverse requires v <= B")
        return _scalar_like(v, (arr - params.gamma1) / params.alpha1)
    if branch == 2:
        if np.any(arr < params.A):
            raise DomainViolationError("branch 2 inverse requires v >= A")
        return _scalar_like(v, (arr - params.gamma2) / params.alpha2)
    raise DomainViolationError(f"branch must be 0, 1 or 2, got {branch!r}")


def branch_gap(params: PhaseParams, v):
    """Width beta2(v) - beta0(v) of the phase superposition, on A <= v <= B.

    Zero exactly at v = A (where the branches meet at u = c) and strictly
    increasing in v.
    """
    arr = _check_finite(v, "branch-gap argument")
    if np.any(arr < params.A) or np.any(arr > params.B):
        raise DomainViolationError("branch gap requires A <= v <= B")
    return _scalar_like(v, branch_gap_extended(params, arr))


def branch_gap_extended(params: PhaseParams, v):
    """beta2 - beta0 via the affine continuations, no domain check."""
    arr = np.asarray(v, dtype=float)
    out = (arr - params.gamma2) / params.alpha2 - (params.b + params.sigma * (arr - params.B))
    return _scalar_like(v, out)


# ---------------------------------------------------------------------------
# monotone entropy fluxes


def _log_cosh(z: np.ndarray) -> np.ndarray:
    # log(cosh z) = |z| + log1p(exp(-2|z|)) - log 2, stable for large |z|
    az = np.abs(z)
    return az + np.log1p(np.exp(-2.0 * az)) - np.log(2.0)


@dataclass(frozen=True)
class EntropyFlux:
    """One member of the built-in family of nondecreasing fluxes.

    Kinds: ``identity`` (g(v) = v), ``clamp`` (g(v) = min(max(v, p), q)) and
    ``tanh`` (g(v) = tanh(v/s), an odd saturating ramp of scale s > 0).
    A constant flux is the degenerate clamp with p = q.
    """

    kind: str
    p: float = 0.0
    q: float = 0.0
    s: float = 1.0

    def __post_init__(self):
        if self.kind not in ("identity", "clamp", "tanh"):
            raise DomainViolationError(f"unknown flux kind {self.kind!r}")
        if self.kind == "clamp" and self.p > self.q:
            raise DomainViolationError("clamp flux requires p <= q")
        if self.kind == "tanh" and self.s <= 0:
            raise DomainViolationError("tanh flux requires positive scale")

    @classmethod
    def identity(cls) -> "EntropyFlux":
        return cls("identity")

    @classmethod
    def clamp(cls, p: float, q: float) -> "EntropyFlux":
        return cls("clamp", p=p, q=q)

    @classmethod
    def saturating(cls, s: float) -> "EntropyFlux":
        return cls("tanh", s=s)

    @classmethod
    def constant(cls, kappa: float) -> "EntropyFlux":
        return cls("clamp", p=kappa, q=kappa)

    def label(self) -> str:
        if self.kind == "identity":
            return "identity"
        if self.kind == "clamp":
            return f"clamp[{self.p:g},{self.q:g}]"
        return f"tanh[s={self.s:g}]"

    def value(self, v):
        arr = np.asarray(v, dtype=float)
        if self.kind == "identity":
            out = arr
        elif self.kind == "clamp":
            out = np.clip(arr, self.p, self.q)
        else:
            out = np.tanh(arr / self.s)
        return _scalar_like(v, np.asarray(out))

    def derivative(self, v):
        arr = np.asarray(v, dtype=float)
        if self.kind == "identity":
            out = np.ones_like(arr)
        elif self.kind == "clamp":
            out = ((arr >= self.p) & (arr <= self.q)).astype(float)
        else:
            t = np.tanh(arr / self.s)
            out = (1.0 - t * t) / self.s
        return _scalar_like(v, out)

    def antiderivative(self, v):
        """A primitive of g, used to integrate g(phi(s)) in closed form."""
        arr = np.asarray(v, dtype=float)
        if self.kind == "identity":
            out = 0.5 * arr * arr
        elif self.kind == "clamp":
            out = np.where(
                arr <= self.p,
                self.p * arr - 0.5 * self.p * self.p,
                np.where(arr >= self.q,
                         self.q * arr - 0.5 * self.q * self.q,
                         0.5 * arr * arr),
            )
        else:
            out = self.s * _log_cosh(arr / self.s)
        return _scalar_like(v, out)


def _branch_primitive(params: PhaseParams, flux: EntropyFlux, u: np.ndarray) -> np.ndarray:
    """Antiderivative W of g(phi(.)), continuous across the breakpoints.

    On each affine piece phi(s) = m*s + q0 an antiderivative of g(phi(s)) is
    Gamma(phi(s))/m with Gamma a primitive of g; the constants glue the
    pieces together at b and c.
    """
    m0 = params.phi0_slope
    gam = flux.antiderivative
    c1 = gam(params.B) * (1.0 / m0 - 1.0 / params.alpha1)
    c2 = gam(params.A) * (1.0 / m0 - 1.0 / params.alpha2)
    return np.where(
        u <= params.b,
        gam(params.alpha1 * u + params.gamma1) / params.alpha1 + c1,
        np.where(
            u >= params.c,
            gam(params.alpha2 * u + params.gamma2) / params.alpha2 + c2,
            gam(m0 * u + params.phi0_intercept) / m0,
        ),
    )


def entropy_primitive(params: PhaseParams, flux: EntropyFlux, u):
    """G(u) = int_0^u g(phi(s)) ds, in closed form (additive constant fixed to 0)."""
    arr = _check_finite(u, "entropy-primitive argument")
    w = _branch_primitive(params, flux, np.atleast_1d(arr))
    w0 = _branch_primitive(params, flux, np.asarray([0.0]))[0]
    out = np.reshape(w - w0, np.shape(arr))
    return _scalar_like(u, out)


def certificate_integrand(params: PhaseParams, flux: EntropyFlux, v):
    """G(beta0(v)) - G(beta2(v)) + (beta2(v) - beta0(v)) * g(v), for A <= v <= B.

    Equals int_{beta0(v)}^{beta2(v)} [g(v) - g(phi(s))] ds, hence >= 0 for every
    nondecreasing g, with equality at v = A.
    """
    arr = _check_finite(v, "certificate argument")
    if np.any(arr < params.A) or np.any(arr > params.B):
        raise DomainViolationError("certificate integrand requires A <= v <= B")
    return _scalar_like(v, certificate_integrand_extended(params, flux, arr))


def certificate_integrand_extended(params: PhaseParams, flux: EntropyFlux, v):
    """Certificate integrand through the affine continuations, no domain check."""
    arr = np.asarray(v, dtype=float)
    b0 = params.b + params.sigma * (arr - params.B)
    b2 = (arr - params.gamma2) / params.alpha2
    out = (entropy_primitive(params, flux, b0)
           - entropy_primitive(params, flux, b2)
           + (b2 - b0) * flux.value(arr))
    return _scalar_like(v, np.asarray(out))
