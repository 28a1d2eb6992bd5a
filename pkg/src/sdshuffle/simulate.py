"""Synthetic data generators: AR(1)-correlated Gaussians, an exponential
Gaussian-copula family, and the benchmark Gaussian.

Each spec's unspecified hyperparameters are drawn from stream ``(seed, 0)``
and the data from stream ``(seed, 1)``, so :func:`resolve` reports exactly
the values a simulation used.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np
from scipy.special import ndtr

from .core import DataMatrix, InvalidParameterError, check_seed, derive_seed, make_rng

U_CLAMP = 1.0 - 1e-16
BENCHMARK_RHO = -0.75


class Family(enum.Enum):
    GAUSSIAN_AR = "gaussian-ar"
    EXPONENTIAL_COPULA = "exponential-copula"
    BENCHMARK_GAUSSIAN = "benchmark-gaussian"


@dataclass(frozen=True)
class SimSpec:
    family: Family
    n: int
    p: int
    seed: int = 0
    rho: Optional[float] = None
    mu: Optional[tuple[float, ...]] = None
    lam: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        check_seed(self.seed)
        if self.n < 2 or self.p < 1:
            raise InvalidParameterError(f"need n >= 2 and p >= 1, got n={self.n}, p={self.p}")
        if self.rho is not None and not -1 < self.rho < 1:
            raise InvalidParameterError(f"rho must lie in (-1, 1), got {self.rho}")
        if self.lam is not None and not self.lam > 0:
            raise InvalidParameterError(f"lambda must be positive, got {self.lam}")
        if self.mu is not None:
            object.__setattr__(self, "mu", tuple(float(m) for m in self.mu))
            if len(self.mu) != self.p:
                raise InvalidParameterError(f"mu has {len(self.mu)} entries for p={self.p}")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["family"] = self.family.value
        d["mu"] = list(self.mu) if self.mu is not None else None
        return d


@dataclass(frozen=True)
class Preset:
    family: Family
    n: int
    p: int
    datasets: int


PRESETS = {
    "gaussian-sim": Preset(Family.GAUSSIAN_AR, 500, 10, 30),
    "exponential-sim": Preset(Family.EXPONENTIAL_COPULA, 500, 10, 30),
}


def resolve(spec: SimSpec) -> SimSpec:
    """Fill unspecified hyperparameters with their seeded random draws."""
    rng = make_rng(spec.seed, 0)
    if spec.family is Family.BENCHMARK_GAUSSIAN:
        return replace(spec, rho=BENCHMARK_RHO, mu=(0.0,) * spec.p, lam=None)
    mu = rng.uniform(-3.0, 3.0, spec.p)
    rho = rng.uniform(-0.8, 0.8)
    lam = rng.uniform(0.1, 10.0)
    if spec.family is Family.GAUSSIAN_AR:
        return replace(
            spec,
            mu=spec.mu if spec.mu is not None else tuple(mu.tolist()),
            rho=spec.rho if spec.rho is not None else float(rho),
            lam=None,
        )
    return replace(
        spec,
        mu=None,
        rho=spec.rho if spec.rho is not None else float(rho),
        lam=spec.lam if spec.lam is not None else float(lam),
    )


def ar1_covariance(p: int, rho: float) -> np.ndarray:
    """sigma_ij = rho^|i-j|, unit diagonal."""
    lag = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
    return np.power(float(rho), lag)


def _correlated_normals(n: int, p: int, rho: float, rng: np.random.Generator) -> np.ndarray:
    cov = ar1_covariance(p, rho)
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - AR(1) with |rho|<1 is PD
        raise RuntimeError(f"Cholesky failed for rho={rho}") from exc
    return rng.standard_normal((n, p)) @ chol.T


def _names(p: int) -> tuple[str, ...]:
    return tuple(f"X{j + 1}" for j in range(p))


def simulate_gaussian_ar(spec: SimSpec) -> DataMatrix:
    """n rows of N_p(mu, Sigma) with AR(1) correlation, via Cholesky."""
    s = resolve(spec)
    z = _correlated_normals(s.n, s.p, s.rho, make_rng(s.seed, 1))
    return DataMatrix(z + np.asarray(s.mu), _names(s.p))


def copula_uniforms(z: np.ndarray) -> np.ndarray:
    """Phi(z), clamped strictly inside (0, 1)."""
    return np.clip(ndtr(z), np.finfo(np.float64).tiny, U_CLAMP)


def simulate_exponential_copula(spec: SimSpec) -> DataMatrix:
    """Exponential(lambda) margins coupled through an AR(1) Gaussian copula."""
    s = resolve(spec)
    z = _correlated_normals(s.n, s.p, s.rho, make_rng(s.seed, 1))
    u = copula_uniforms(z)
    return DataMatrix(-np.log1p(-u) / s.lam, _names(s.p))


def simulate_benchmark(n: int, p: int, seed: int = 0) -> DataMatrix:
    """Zero-mean Gaussian with sigma_ij = (-0.75)^|i-j|."""
    return simulate_gaussian_ar(SimSpec(Family.BENCHMARK_GAUSSIAN, n, p, seed))


def simulate(spec: SimSpec) -> DataMatrix:
    if spec.family is Family.EXPONENTIAL_COPULA:
        return simulate_exponential_copula(spec)
    return simulate_gaussian_ar(spec)


def preset_specs(name: str, seed: int, datasets: int | None = None) -> list[SimSpec]:
    """Specs for a named preset; dataset d uses seed ``derive_seed(seed, d)``."""
    try:
        pr = PRESETS[name]
    except KeyError:
        raise InvalidParameterError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    count = pr.datasets if datasets is None else datasets
    return [SimSpec(pr.family, pr.n, pr.p, derive_seed(seed, d)) for d in range(count)]
