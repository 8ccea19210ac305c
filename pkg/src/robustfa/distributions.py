"""Random draws for heavy-tailed and skewed multivariate families.

Everything here is driven by counter-based random streams (Philox keyed by a
(seed, stream_id) pair), so any part of a simulation can be regenerated in
isolation and results never depend on execution order across streams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .linalg import sym_eig
from .validation import as_matrix, check_positive_int, check_square_symmetric, symmetrize


@dataclass(frozen=True)
class RngStream:
    """Identity of one reproducible random stream.

    The (seed, stream_id) pair keys a Philox counter-based generator, so
    streams with different ids are statistically independent and a stream can
    be reconstructed anywhere from the two integers alone.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array(
            [self.seed % 2**64, self.stream_id % 2**64], dtype=np.uint64
        )
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, index: int) -> "RngStream":
        """Derived sub-stream; index k maps to a distinct stream_id."""
        mixed = (self.stream_id * 6364136223846793005 + 1442695040888963407 + index) % 2**64
        return RngStream(self.seed, mixed)


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise InvalidInput(f"rng must be an RngStream or numpy Generator, got {type(rng).__name__}")


class GaussianRadial:
    """chi(q) radial law; with shape root A this reproduces N(mu, A A')."""

    def __repr__(self):  # pragma: no cover
        return "GaussianRadial()"


@dataclass(frozen=True)
class StudentRadial:
    """Radial law of the q-dimensional t distribution with nu dof."""

    nu: float

    def __post_init__(self):
        if not (self.nu > 0):
            raise InvalidInput(f"nu must be positive, got {self.nu}")


@dataclass(frozen=True)
class ConstantRadial:
    """Degenerate radial law; all mass on a single nonnegative radius."""

    value: float

    def __post_init__(self):
        if not (self.value >= 0):
            raise InvalidInput(f"radius must be nonnegative, got {self.value}")


def _radial_draws(radial, gen: np.random.Generator, n: int, q: int) -> np.ndarray:
    if isinstance(radial, GaussianRadial):
        return np.sqrt(gen.chisquare(q, size=n))
    if isinstance(radial, StudentRadial):
        chi_q = gen.chisquare(q, size=n)
        chi_nu = gen.chisquare(radial.nu, size=n)
        return np.sqrt(chi_q * radial.nu / chi_nu)
    if isinstance(radial, ConstantRadial):
        return np.full(n, radial.value)
    if callable(radial):
        draws = np.asarray(radial(gen, n), dtype=np.float64)
        if draws.shape != (n,):
            raise InvalidInput(f"radial sampler returned shape {draws.shape}, wanted ({n},)")
        if not np.isfinite(draws).all() or (draws < 0).any():
            raise InvalidInput("radial sampler produced negative or non-finite radii")
        return draws
    raise InvalidInput(f"unsupported radial law {radial!r}")


@dataclass(frozen=True, eq=False)
class EllipticalSpec:
    """Stochastic representation mu + zeta A u of an elliptical family.

    ``shape_root`` is the (dim, q) factor A with A A' the scatter matrix; it
    may be rank deficient, in which case draws live in the affine subspace
    mu + span(A). ``radial`` is one of GaussianRadial, StudentRadial,
    ConstantRadial, or a callable (generator, size) -> nonnegative radii.
    """

    shape_root: np.ndarray
    radial: object
    location: np.ndarray | None = None

    def __post_init__(self):
        A = as_matrix(self.shape_root, "shape_root")
        if A.shape[1] < 1:
            raise InvalidInput("shape_root needs at least one column")
        object.__setattr__(self, "shape_root", A)
        if self.location is not None:
            mu = np.ascontiguousarray(self.location, dtype=np.float64)
            if mu.shape != (A.shape[0],) or not np.isfinite(mu).all():
                raise InvalidInput(f"location must be a finite vector of length {A.shape[0]}")
            object.__setattr__(self, "location", mu)

    @property
    def dim(self) -> int:
        return self.shape_root.shape[0]


def _sphere_rows(gen: np.random.Generator, n: int, dim: int) -> np.ndarray:
    G = gen.standard_normal((n, dim))
    norms = np.sqrt(np.einsum("ij,ij->i", G, G))
    # a zero norm has probability zero but would poison everything downstream
    while (bad := norms == 0.0).any():  # pragma: no cover
        G[bad] = gen.standard_normal((int(bad.sum()), dim))
        norms = np.sqrt(np.einsum("ij,ij->i", G, G))
    return G / norms[:, None]


def sample_sphere(dim: int, rng) -> np.ndarray:
    """One point uniform on the unit sphere in R^dim."""
    dim = check_positive_int(dim, "dim")
    gen = _as_generator(rng)
    return _sphere_rows(gen, 1, dim)[0]


def sample_elliptical(spec: EllipticalSpec, n: int, rng) -> np.ndarray:
    """Draw n rows from the elliptical family described by ``spec``.

    Internally draws the sphere block first, then the radial block, so the
    output is a fixed function of (spec, n, stream).
    """
    if not isinstance(spec, EllipticalSpec):
        raise InvalidInput("spec must be an EllipticalSpec")
    n = check_positive_int(n, "n")
    gen = _as_generator(rng)
    A = spec.shape_root
    U = _sphere_rows(gen, n, A.shape[1])
    zeta = _radial_draws(spec.radial, gen, n, A.shape[1])
    rows = zeta[:, None] * (U @ A.T)
    if spec.location is not None:
        rows += spec.location
    return rows


def _psd_root(sigma, name: str = "sigma") -> np.ndarray:
    """Factor R with R R' = sigma for a PSD matrix; eigenvalue-based."""
    S = check_square_symmetric(sigma, name)
    w, V = sym_eig(S)
    if w[-1] < -1e-8:
        raise InvalidInput(f"{name} has eigenvalue {w[-1]:.3e}; not positive semidefinite")
    return V * np.sqrt(np.clip(w, 0.0, None))


def sample_mvt(nu: float, sigma, n: int, rng) -> np.ndarray:
    """Multivariate t draws with dof nu and scatter sigma, centered at zero.

    Uses the normal scale mixture: Z sqrt(nu / w) with Z ~ N(0, sigma) and
    w ~ chi-square(nu), drawn in that order. For nu <= 2 the covariance does
    not exist; sigma is still the elliptical scatter parameter.
    """
    if not (nu > 0):
        raise InvalidInput(f"nu must be positive, got {nu}")
    n = check_positive_int(n, "n")
    root = _psd_root(sigma)
    gen = _as_generator(rng)
    Z = gen.standard_normal((n, root.shape[0])) @ root.T
    w = gen.chisquare(nu, size=n)
    return Z * np.sqrt(nu / w)[:, None]


def sample_skewed_t(xi, omega, alpha, nu: float, n: int, rng) -> np.ndarray:
    """Skew-t draws via hidden truncation of a correlated normal pair.

    With delta = omega alpha / sqrt(1 + alpha' omega alpha), draws
    X = |W0| delta + W1 where W0 ~ N(0, 1) and W1 ~ N(0, omega - delta delta'),
    then divides by sqrt(w / nu) for w ~ chi-square(nu) and shifts by xi.
    alpha = 0 reduces to the symmetric t with scatter omega. Draw order is
    W0, then W1, then w.
    """
    if not (nu > 0):
        raise InvalidInput(f"nu must be positive, got {nu}")
    n = check_positive_int(n, "n")
    Om = check_square_symmetric(omega, "omega")
    d = Om.shape[0]
    xi = np.ascontiguousarray(xi, dtype=np.float64)
    a = np.ascontiguousarray(alpha, dtype=np.float64)
    if xi.shape != (d,) or not np.isfinite(xi).all():
        raise InvalidInput(f"xi must be a finite vector of length {d}")
    if a.shape != (d,) or not np.isfinite(a).all():
        raise InvalidInput(f"alpha must be a finite vector of length {d}")
    delta = Om @ a / np.sqrt(1.0 + a @ Om @ a)
    root = _psd_root(symmetrize(Om - np.outer(delta, delta)), "omega - delta delta'")
    gen = _as_generator(rng)
    w0 = gen.standard_normal(n)
    W1 = gen.standard_normal((n, d)) @ root.T
    X = np.abs(w0)[:, None] * delta + W1
    w = gen.chisquare(nu, size=n)
    return xi + X * np.sqrt(nu / w)[:, None]


def sample_alpha_stable(
    alpha: float, beta: float, gamma: float, delta: float, n: int, rng
) -> np.ndarray:
    """Univariate alpha-stable draws by the Chambers-Mallows-Stuck method.

    Parameters follow S_alpha(beta, gamma, delta): stability alpha in (0, 2],
    skewness beta in [-1, 1], scale gamma > 0, location delta. alpha = 2 is
    Gaussian with variance 2 gamma^2 (beta then has no effect); alpha = 1,
    beta = 0 is Cauchy. The alpha = 1 asymmetric case uses the standard CMS
    branch with a plain gamma scale.
    """
    if not (0.0 < alpha <= 2.0):
        raise InvalidInput(f"alpha must be in (0, 2], got {alpha}")
    if not (-1.0 <= beta <= 1.0):
        raise InvalidInput(f"beta must be in [-1, 1], got {beta}")
    if not (gamma > 0):
        raise InvalidInput(f"gamma must be positive, got {gamma}")
    if not np.isfinite(delta):
        raise InvalidInput(f"delta must be finite, got {delta}")
    n = check_positive_int(n, "n")
    gen = _as_generator(rng)
    phi = (gen.uniform(size=n) - 0.5) * np.pi
    w = gen.standard_exponential(size=n)
    if alpha == 2.0:
        x = 2.0 * np.sqrt(w) * np.sin(phi)
    elif alpha == 1.0:
        if beta == 0.0:
            x = np.tan(phi)
        else:
            bphi = 0.5 * np.pi + beta * phi
            x = (2.0 / np.pi) * (
                bphi * np.tan(phi)
                - beta * np.log(0.5 * np.pi * w * np.cos(phi) / bphi)
            )
    elif beta == 0.0:
        x = (
            np.sin(alpha * phi)
            / np.cos(phi) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * phi) / w) ** ((1.0 - alpha) / alpha)
        )
    else:
        shift = np.arctan(beta * np.tan(0.5 * np.pi * alpha)) / alpha
        scale = (1.0 + (beta * np.tan(0.5 * np.pi * alpha)) ** 2) ** (0.5 / alpha)
        x = (
            scale
            * np.sin(alpha * (phi + shift))
            / np.cos(phi) ** (1.0 / alpha)
            * (np.cos(phi - alpha * (phi + shift)) / w) ** ((1.0 - alpha) / alpha)
        )
    return gamma * x + delta
