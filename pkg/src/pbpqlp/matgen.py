"""Synthetic test-matrix generators with known reference spectra.

Each synthetic family draws random orthogonal factors from a seeded Gaussian
stream and plants an exactly known singular spectrum, so approximation errors
can be judged against ground truth.  :class:`SpectrumSpec` is the declarative
description used by the command-line harness (``family[:params]`` strings).

Families
--------
* ``lowrank`` — rank-``k`` matrix with a linearly decaying spectrum plus a
  spectral-norm-normalized Gaussian noise term of size ``mu * sigma_k``;
  ``mu`` controls the gap at index ``k`` (``~1/mu``).
* ``stairs``  — a descending staircase spectrum: flat steps of ``step_len``
  equal singular values, each step ``step_ratio`` times the previous.
* ``fast``    — exponential decay ``sigma_i = exp(-i/6)``.
* ``slow``    — algebraic decay ``sigma_i = i**-2``.
* ``hansen``  — the deterministic ill-posed kernels of :mod:`pbpqlp.hansen`
  (no reference spectrum; no seed dependence).
* ``image``   — a grayscale image loaded from a PGM file.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import ParameterError
from .hansen import HANSEN_NAMES, gen_hansen
from .linalg import orth, spectral_norm
from .validation import check_count, check_fraction, check_matrix

__all__ = [
    "SpectrumSpec",
    "gen_low_rank_plus_noise",
    "gen_devils_stairs",
    "gen_decay",
]

#: Smallest retained value of the linear ramp in the low-rank family.
_RAMP_FLOOR = 1e-25


def _rng(seed):
    return np.random.Generator(np.random.Philox(key=int(seed)))


def _planted_matrix(reference, rng):
    """Dense matrix with singular values ``reference`` and random U, V."""
    n = reference.shape[0]
    r = int(np.count_nonzero(reference))
    r = max(r, 1)
    u = orth(rng.standard_normal((n, r)))
    v = orth(rng.standard_normal((n, r)))
    return (u * reference[:r]) @ v.T


def gen_low_rank_plus_noise(n, k, mu, seed=0):
    """Rank-``k`` matrix with a linear spectrum plus scaled Gaussian noise.

    The planted spectrum is the first ``k`` entries of a linear ramp from 1
    down to ``1e-25`` across all ``n`` indices (so ``sigma_k`` stays of order
    one for ``k << n``), zero beyond ``k``.  The noise term is a Gaussian
    matrix divided by its spectral norm and scaled by ``mu * sigma_k``, which
    places the ``(k+1)``-th singular value of the sum near ``mu * sigma_k``
    and the gap near ``1/mu``.

    Returns
    -------
    (numpy.ndarray, numpy.ndarray)
        The matrix and the reference spectrum of its noise-free part
        (length ``n``, zeros beyond ``k``).
    """
    n = check_count(n, "n", minimum=2)
    k = check_count(k, "k", minimum=1, maximum=n - 1)
    mu = check_fraction(mu, "mu", low=0.0, high=np.inf, inclusive_low=True)
    rng = _rng(seed)

    reference = np.zeros(n)
    reference[:k] = 1.0 - np.arange(k) * (1.0 - _RAMP_FLOOR) / (n - 1)
    a = _planted_matrix(reference, rng)
    if mu > 0.0:
        noise = rng.standard_normal((n, n))
        a = a + (mu * reference[k - 1] / spectral_norm(noise)) * noise
    return a, reference


def gen_devils_stairs(n, step_len=15, step_ratio=0.5, seed=0):
    """Staircase spectrum: steps of ``step_len`` equal values, each step
    ``step_ratio`` times the previous one.

    Returns the matrix and its reference spectrum.
    """
    n = check_count(n, "n", minimum=1)
    step_len = check_count(step_len, "step_len", minimum=1)
    step_ratio = check_fraction(step_ratio, "step_ratio", low=0.0, high=1.0)
    rng = _rng(seed)
    reference = step_ratio ** (np.arange(n) // step_len).astype(float)
    return _planted_matrix(reference, rng), reference


def gen_decay(n, kind, seed=0):
    """Full-rank matrix with ``exp(-i/6)`` (``fast``) or ``i**-2`` (``slow``)
    singular values, ``i = 1..n``.

    Returns the matrix and its reference spectrum.
    """
    n = check_count(n, "n", minimum=1)
    i = np.arange(1, n + 1, dtype=float)
    if kind == "fast":
        reference = np.exp(-i / 6.0)
    elif kind == "slow":
        reference = i**-2.0
    else:
        raise ParameterError(f"kind must be 'fast' or 'slow', got {kind!r}")
    return _planted_matrix(reference, _rng(seed)), reference


_FAMILIES = ("lowrank", "stairs", "fast", "slow", "hansen", "image")


def _parse_params(text, spec_name):
    params = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ParameterError(f"{spec_name}: expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        params[key.strip()] = value.strip()
    return params


@dataclass(frozen=True)
class SpectrumSpec:
    """Declarative description of a test matrix and its reference spectrum.

    Build one directly or parse the compact harness syntax, e.g.::

        SpectrumSpec.parse("lowrank:k=20,mu=0.005", n=1000, seed=3)
        SpectrumSpec.parse("hansen:baart", n=256)
        SpectrumSpec.parse("image:photo.pgm")

    ``build()`` returns the matrix; ``reference_spectrum()`` returns the
    planted singular values for synthetic families and ``None`` for the
    ``hansen`` and ``image`` families, whose spectra are not known in closed
    form.
    """

    family: str
    n: int = 0
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ParameterError(
                f"unknown matrix family {self.family!r}; choose from {', '.join(_FAMILIES)}"
            )
        if self.family == "image":
            if not self.params.get("path"):
                raise ParameterError("image family needs a file path, e.g. image:photo.pgm")
            return
        minimum_order = 2 if self.family == "lowrank" else 1
        check_count(self.n, "n", minimum=minimum_order)
        if self.family == "hansen":
            name = str(self.params.get("name", "")).lower()
            if name not in HANSEN_NAMES:
                raise ParameterError(
                    f"hansen family needs name in {{{', '.join(HANSEN_NAMES)}}}, got {name!r}"
                )
        elif self.family == "lowrank":
            check_count(self.params.get("k", 20), "k", minimum=1, maximum=self.n - 1)
            check_fraction(
                float(self.params.get("mu", 0.005)), "mu", low=0.0, high=np.inf, inclusive_low=True
            )
        elif self.family == "stairs":
            check_count(self.params.get("step_len", 15), "step_len", minimum=1)
            check_fraction(float(self.params.get("step_ratio", 0.5)), "step_ratio", 0.0, 1.0)

    @classmethod
    def parse(cls, text, n=0, seed=0):
        """Parse a ``family[:params]`` string into a spec."""
        text = str(text).strip()
        family, _, rest = text.partition(":")
        family = family.lower()
        if family == "hansen":
            params = {"name": rest.strip().lower()}
        elif family == "image":
            params = {"path": rest.strip()}
        else:
            params = _parse_params(rest, family)
            for key in ("k", "step_len"):
                if key in params:
                    params[key] = int(params[key])
            for key in ("mu", "step_ratio"):
                if key in params:
                    params[key] = float(params[key])
            extra = set(params) - {"k", "mu", "step_len", "step_ratio"}
            if extra:
                raise ParameterError(f"{family}: unknown parameters {sorted(extra)}")
        return cls(family=family, n=int(n), seed=int(seed), params=params)

    def describe(self):
        """Canonical one-token description (parseable by :meth:`parse`)."""
        if self.family == "hansen":
            return f"hansen:{self.params['name']}"
        if self.family == "image":
            return f"image:{self.params['path']}"
        if not self.params:
            return self.family
        inner = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        return f"{self.family}:{inner}"

    def build(self):
        """Construct the matrix described by this spec."""
        if self.family == "lowrank":
            a, _ = gen_low_rank_plus_noise(
                self.n,
                int(self.params.get("k", 20)),
                float(self.params.get("mu", 0.005)),
                self.seed,
            )
            return a
        if self.family == "stairs":
            a, _ = gen_devils_stairs(
                self.n,
                int(self.params.get("step_len", 15)),
                float(self.params.get("step_ratio", 0.5)),
                self.seed,
            )
            return a
        if self.family in ("fast", "slow"):
            a, _ = gen_decay(self.n, self.family, self.seed)
            return a
        if self.family == "hansen":
            return gen_hansen(self.params["name"], self.n)
        # image
        from .pgm import load_pgm

        return check_matrix(load_pgm(self.params["path"]), "image")

    def reference_spectrum(self):
        """Planted singular values, or ``None`` when not known in closed form."""
        if self.family == "lowrank":
            k = int(self.params.get("k", 20))
            reference = np.zeros(self.n)
            reference[:k] = 1.0 - np.arange(k) * (1.0 - _RAMP_FLOOR) / (self.n - 1)
            return reference
        if self.family == "stairs":
            step_len = int(self.params.get("step_len", 15))
            ratio = float(self.params.get("step_ratio", 0.5))
            return ratio ** (np.arange(self.n) // step_len).astype(float)
        if self.family == "fast":
            return np.exp(-np.arange(1, self.n + 1) / 6.0)
        if self.family == "slow":
            return np.arange(1, self.n + 1, dtype=float) ** -2.0
        return None
