"""Machine-checkable evaluation of the factorization's accuracy guarantees.

Every guarantee is phrased as ``lhs <= rhs`` and recorded as a
:class:`BoundEntry` with its slack.  Entries come in two kinds:

* **strict** — inequalities that hold deterministically on valid input; a
  single violation (beyond the round-off tolerance) indicates an
  implementation bug and drives a nonzero exit status in the harness.
* **non-strict** — entries whose leading constant is unknown (taken as 1),
  that hold only with a stated probability per run, or that are recorded
  purely for audit.  These never fail a report on their own; the
  probabilistic ones are asserted in aggregate through their empirical
  violation frequency over independent trials.

The guarantees analyze the sketched QLP factorization through the rotated
test matrix ``U.T @ phi`` (``U`` the left singular vectors of the input,
``phi`` the Gaussian test matrix), split two ways:

* rows split after ``d - p``: ``phi_top`` / ``phi_bottom`` control the
  full-range-capture bound via the coupling factor
  ``||phi_bottom|| * ||pinv(phi_top)||``;
* rows and columns split after ``k``: the leading ``k x k`` block
  ``phi_11`` and the block below it ``phi_21`` control everything tied to the
  *leading* ``k`` columns of the unpivoted QR (subspace distances, the
  trailing-block norm, the rank bracket) via ``||phi_21 @ inv(phi_11)||``.
  Only the first ``k`` sketch columns feed those leading QR columns, so the
  oversampled ``d - p`` split cannot appear in these bounds.

Each sketch term is attenuated by a spectral-gap ratio raised to the number
of times the input multiplies the sketch: ``2q + 2`` for column-space objects
(the orthonormal range basis), ``2q + 1`` for row-space objects (the
projection basis, and with it the projected singular values).  Those powers
drive the error terms to zero exponentially in ``q``.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algorithms import QlpFactors, SketchRecord, pbp_qlp
from .analysis import _sv_max, _sv_min, subspace_distance
from .exceptions import ContextError
from .linalg import SvdFactors, spectral_norm, svd_full
from .validation import check_count, check_fraction, check_matrix

__all__ = [
    "TOLERANCE_SCALE",
    "SKETCH_BLOCK_CONDITION_LIMIT",
    "BLOCK12_CHOICES",
    "inequality_tolerance",
    "BoundEntry",
    "BoundContext",
    "BoundReport",
    "tail_constant",
    "eval_deterministic_bounds",
    "eval_sv_ratio_bound",
    "eval_highprob_bounds",
]

#: Additive tolerance scale absorbing kernel round-off in inequality checks.
TOLERANCE_SCALE = 1e-10

#: Condition-number ceiling on the leading sketch block before the
#: subspace-distance bounds are declared non-evaluable.
SKETCH_BLOCK_CONDITION_LIMIT = 1e12

#: How to resolve the structurally zero (1,2) block in the final triangular
#: factor when evaluating the singular-value ratio floor: take it as exactly
#: zero, or substitute the first-stage ``R`` coupling block.
BLOCK12_CHOICES = ("strict-zero", "use-r12")


def inequality_tolerance(rhs):
    """Additive slack allowed when checking ``lhs <= rhs``."""
    return TOLERANCE_SCALE * max(1.0, rhs)


@dataclass(frozen=True)
class BoundEntry:
    """One evaluated inequality ``lhs <= rhs`` with its run parameters."""

    bound: str
    lhs: float
    rhs: float
    seed: int
    n1: int
    n2: int
    k: int
    d: int
    p: int
    q: int
    strict: bool = True
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "lhs", float(self.lhs))
        object.__setattr__(self, "rhs", float(self.rhs))

    @property
    def slack(self):
        """``rhs - lhs``; negative means the inequality is violated."""
        return self.rhs - self.lhs

    @property
    def satisfied(self):
        return self.lhs <= self.rhs + inequality_tolerance(self.rhs)


@dataclass(frozen=True)
class BoundContext:
    """Everything the evaluators need beyond the factors themselves.

    ``oracle`` is the full SVD of the analyzed matrix; ``k`` the target rank;
    ``p`` an analysis-only slack integer with ``k + p <= d`` that tightens
    ``delta_i = sigma_{d-p+1} / sigma_i``; ``q`` the power-iteration exponent
    of the factorization under test; ``upsilon`` the failure probability of
    the probabilistic guarantees.  ``sketch`` is optional — when present it
    must agree with the factors being evaluated; when ``None`` the evaluators
    read the sketch from the factors, so one context can serve many seeds.
    """

    oracle: SvdFactors
    k: int
    d: int
    p: int
    q: int
    upsilon: float = 0.05
    sketch: Optional[SketchRecord] = None

    def __post_init__(self):
        if not isinstance(self.oracle, SvdFactors):
            raise ContextError(
                f"oracle must be SvdFactors, got {type(self.oracle).__name__}"
            )
        check_count(self.k, "k", minimum=1)
        check_count(self.d, "d", minimum=1)
        check_count(self.p, "p", minimum=0)
        check_count(self.q, "q", minimum=0)
        if self.k + self.p > self.d:
            raise ContextError(
                f"k + p must not exceed d, got k={self.k}, p={self.p}, d={self.d}"
            )
        check_fraction(self.upsilon, "upsilon")
        if self.sketch is not None and (self.sketch.d, self.sketch.q) != (self.d, self.q):
            raise ContextError(
                "context sketch disagrees with context parameters: "
                f"sketch has d={self.sketch.d}, q={self.sketch.q}, "
                f"context has d={self.d}, q={self.q}"
            )

    @classmethod
    def from_matrix(cls, a, k, d, p, q, upsilon=0.05):
        """Context with a freshly computed oracle SVD and no pinned sketch."""
        a = check_matrix(a, "a")
        return cls(oracle=svd_full(a), k=k, d=d, p=p, q=q, upsilon=upsilon)

    @classmethod
    def from_factorization(cls, a, factors, k, p, upsilon=0.05, oracle=None):
        """Context pinned to one factorization's sketch (seed, d, q)."""
        a = check_matrix(a, "a")
        sketch = _require_sketch(factors)
        if oracle is None:
            oracle = svd_full(a)
        return cls(
            oracle=oracle,
            k=k,
            d=sketch.d,
            p=p,
            q=sketch.q,
            upsilon=upsilon,
            sketch=sketch,
        )

    def sigma(self, i):
        """The ``i``-th largest singular value (1-based); zero past the end."""
        s = self.oracle.s
        return float(s[i - 1]) if 1 <= i <= s.size else 0.0

    def delta(self, i):
        """Attenuation ratio ``sigma_{d-p+1} / sigma_i`` (at most 1 for i <= k)."""
        return _ratio(self.sigma(self.d - self.p + 1), self.sigma(i))


@dataclass
class BoundReport:
    """A batch of evaluated inequalities plus the run's context summary."""

    entries: list
    context: dict = field(default_factory=dict)

    #: Column order of the serialized flat table.
    HEADER = (
        "bound",
        "lhs",
        "rhs",
        "slack",
        "satisfied",
        "seed",
        "n1",
        "n2",
        "k",
        "d",
        "p",
        "q",
        "strict",
        "note",
    )

    def violations(self):
        """Strict entries whose inequality fails beyond tolerance."""
        return [e for e in self.entries if e.strict and not e.satisfied]

    @property
    def ok(self):
        return not self.violations()

    def to_rows(self):
        """One tuple per entry, ordered as :data:`HEADER`."""
        return [
            (
                e.bound,
                e.lhs,
                e.rhs,
                e.slack,
                int(e.satisfied),
                e.seed,
                e.n1,
                e.n2,
                e.k,
                e.d,
                e.p,
                e.q,
                int(e.strict),
                e.note,
            )
            for e in self.entries
        ]


def _ratio(num, den):
    if num == 0.0:
        return 0.0
    if den == 0.0:
        return math.inf
    return num / den


def _attenuate(sigma1, t):
    """``sigma1 * t / sqrt(1 + t^2)``: a sketch term of size ``t`` after
    projection never costs more than ``sigma1`` and vanishes with ``t``."""
    if math.isinf(t):
        return sigma1
    return sigma1 * t / math.sqrt(1.0 + t * t)


def _ratio_floor(t):
    """Lower floor ``1 / sqrt(1 + t^2)`` on a projected singular-value ratio."""
    if math.isinf(t):
        return 0.0
    return 1.0 / math.sqrt(1.0 + t * t)


def _require_sketch(factors):
    if not isinstance(factors, QlpFactors):
        raise ContextError(
            f"bound evaluation expects QlpFactors, got {type(factors).__name__}"
        )
    if factors.sketch is None:
        raise ContextError(
            "factors carry no sketch record; the deterministic factorization "
            "has no test matrix to analyze"
        )
    return factors.sketch


def _resolve_sketch(factors, ctx):
    """The sketch to analyze, cross-checked against the context."""
    sketch = _require_sketch(factors)
    if ctx.sketch is not None and (
        ctx.sketch.seed,
        ctx.sketch.d,
        ctx.sketch.q,
    ) != (sketch.seed, sketch.d, sketch.q):
        raise ContextError(
            "context is pinned to a different factorization: context sketch "
            f"(seed={ctx.sketch.seed}, d={ctx.sketch.d}, q={ctx.sketch.q}) vs "
            f"factors sketch (seed={sketch.seed}, d={sketch.d}, q={sketch.q})"
        )
    if (sketch.d, sketch.q) != (ctx.d, ctx.q):
        raise ContextError(
            f"factors were computed with d={sketch.d}, q={sketch.q} but the "
            f"context declares d={ctx.d}, q={ctx.q}"
        )
    return sketch


class _SketchBlocks:
    """Norms of the rotated test matrix's blocks, with precondition checks."""

    def __init__(self, ctx, sketch):
        u = ctx.oracle.u
        phi = sketch.test_matrix
        if phi.shape != (u.shape[0], ctx.d):
            raise ContextError(
                f"test matrix has shape {phi.shape}, expected {(u.shape[0], ctx.d)}"
            )
        rotated = u.T @ phi
        split = ctx.d - ctx.p
        top = rotated[:split]
        bottom = rotated[split:]
        s_top = np.linalg.svd(top, compute_uv=False)
        if s_top[-1] <= 0.0:
            raise ContextError(
                f"the first d - p = {split} rows of the rotated test matrix "
                "are rank-deficient; the trailing-block bounds require full "
                "row rank"
            )
        self.coupling = _sv_max(bottom) / float(s_top[-1])

        lead = rotated[: ctx.k, : ctx.k]
        below = rotated[ctx.k :, : ctx.k]
        s_lead = np.linalg.svd(lead, compute_uv=False)
        if s_lead[-1] <= 0.0 or s_lead[0] / s_lead[-1] > SKETCH_BLOCK_CONDITION_LIMIT:
            raise ContextError(
                f"the leading {ctx.k} x {ctx.k} block of the rotated test "
                "matrix is numerically singular (condition number "
                f"{math.inf if s_lead[-1] <= 0.0 else s_lead[0] / s_lead[-1]:.3e}); "
                "the subspace-distance bounds require it to be invertible"
            )
        if below.size == 0:
            self.cross_norm = 0.0
        else:
            cross = np.linalg.solve(lead.T, below.T).T
            self.cross_norm = _sv_max(cross)


def _worst_index(lhs_values, rhs_values):
    """Index (0-based) maximizing ``lhs - rhs`` — the tightest inequality."""
    margins = np.asarray(lhs_values) - np.asarray(rhs_values)
    return int(np.argmax(margins))


def eval_deterministic_bounds(a, factors, ctx):
    """Evaluate every per-run guarantee of the sketched QLP factorization.

    Returns a :class:`BoundReport` with one entry per inequality.  All strict
    entries hold on valid input up to :func:`inequality_tolerance`; the
    singular-value ratio floors (both resolutions of the structurally zero
    block) are included as non-strict audit rows.

    Raises :class:`~pbpqlp.exceptions.ContextError` when the factors carry no
    sketch, disagree with the context, or the rotated test matrix fails the
    invertibility preconditions.
    """
    a = check_matrix(a, "a")
    sketch = _resolve_sketch(factors, ctx)
    n1, n2 = a.shape
    if factors.q_basis.shape[0] != n1 or factors.p_basis.shape[0] != n2:
        raise ContextError(
            f"factors were computed from a matrix of shape "
            f"({factors.q_basis.shape[0]}, {factors.p_basis.shape[0]}), "
            f"but a has shape {a.shape}"
        )
    k, d, p, q = ctx.k, ctx.d, ctx.p, ctx.q
    meta = {"seed": sketch.seed, "n1": n1, "n2": n2, "k": k, "d": d, "p": p, "q": q}
    blocks = _SketchBlocks(ctx, sketch)

    sigma1 = ctx.sigma(1)
    sigma_k = ctx.sigma(k)
    sigma_k1 = ctx.sigma(k + 1)
    gap = min(_ratio(sigma_k1, sigma_k), 1.0)
    gap_even = gap ** (2 * q + 2) * blocks.cross_norm
    gap_odd = gap ** (2 * q + 1) * blocks.cross_norm
    range_term = ctx.delta(k) ** (2 * q + 2) * blocks.coupling

    r = factors.first_stage_r
    l = factors.l
    r11, r22 = r[:k, :k], r[k:, k:]
    l11 = l[:k, :k]
    sv_min_r11 = _sv_min(r11)
    sv_min_l11 = _sv_min(l11)

    entries = [
        BoundEntry(
            "trailing_block_norm",
            _sv_max(r22),
            sigma_k1 + _attenuate(sigma1, gap_even),
            **meta,
        ),
        BoundEntry("leading_block_sigma_min_lower", sigma_k1, sv_min_r11, **meta),
        BoundEntry("leading_block_sigma_min_upper", sv_min_r11, sigma_k + sigma_k1, **meta),
        BoundEntry(
            "left_subspace_dist",
            subspace_distance(ctx.oracle.u[:, :k], factors.q_basis[:, :k]),
            gap_even,
            **meta,
        ),
        BoundEntry(
            "right_subspace_dist",
            subspace_distance(ctx.oracle.v[:, :k], factors.p_basis[:, :k]),
            gap_odd,
            **meta,
        ),
        BoundEntry(
            "range_capture_error",
            spectral_norm(a - factors.q_basis @ (factors.q_basis.T @ a)),
            sigma_k1 + _attenuate(sigma1, range_term),
            **meta,
        ),
    ]

    projected = np.linalg.svd(a @ factors.projection_basis(), compute_uv=False)
    true_svs = [ctx.sigma(i) for i in range(1, k + 1)]
    floors = [
        ctx.sigma(i)
        * _ratio_floor(ctx.delta(i) ** (2 * q + 1) * blocks.coupling)
        for i in range(1, k + 1)
    ]
    i_up = _worst_index(projected[:k], true_svs)
    entries.append(
        BoundEntry(
            "projected_sv_upper",
            float(projected[i_up]),
            true_svs[i_up],
            **meta,
            note=f"worst index i={i_up + 1}",
        )
    )
    i_low = _worst_index(floors, projected[:k])
    entries.append(
        BoundEntry(
            "projected_sv_lower",
            floors[i_low],
            float(projected[i_low]),
            **meta,
            note=f"worst index i={i_low + 1}",
        )
    )

    entries.extend(
        [
            BoundEntry("rank_sigma_bracket_lower", sv_min_l11, sigma_k, **meta),
            BoundEntry(
                "rank_sigma_bracket_upper",
                sigma_k,
                sv_min_l11 + sigma1 * gap_even,
                **meta,
            ),
            BoundEntry("l11_dominates_r11", sv_min_r11, sv_min_l11, **meta),
            BoundEntry("l22_below_r22", _sv_max(l[k:, k:]), _sv_max(r22), **meta),
        ]
    )
    for choice in BLOCK12_CHOICES:
        entries.append(eval_sv_ratio_bound(factors, ctx, block12=choice))

    context = dict(meta)
    context["upsilon"] = ctx.upsilon
    return BoundReport(entries=entries, context=context)


def eval_sv_ratio_bound(factors, ctx, block12="strict-zero"):
    """Floor on ``sigma_i(L_11) / sigma_i`` for ``i = 1..k`` (worst ``i``).

    The floor's correction term divides by ``1 - rho^2`` with
    ``rho = ||L_22|| / sigma_k(L_11)``; with ``block12="strict-zero"`` the
    structurally zero (1,2) block makes the correction vanish, while
    ``"use-r12"`` substitutes the first-stage coupling block ``R_12``.  The
    leading constant of the correction is unknown and taken as 1, so the
    entry is non-strict (audit only); when ``rho >= 1`` the correction is
    undefined and the entry is flagged inactive with an infinite right side.
    """
    if block12 not in BLOCK12_CHOICES:
        raise ContextError(
            f"block12 must be one of {BLOCK12_CHOICES}, got {block12!r}"
        )
    sketch = _resolve_sketch(factors, ctx)
    k, q = ctx.k, ctx.q
    n1 = factors.q_basis.shape[0]
    n2 = factors.p_basis.shape[0]
    meta = {
        "seed": sketch.seed,
        "n1": n1,
        "n2": n2,
        "k": k,
        "d": ctx.d,
        "p": ctx.p,
        "q": q,
    }
    blocks = _SketchBlocks(ctx, sketch)
    l = factors.l
    l11_svs = np.linalg.svd(l[:k, :k], compute_uv=False)
    sigma_k_l11 = float(l11_svs[-1])
    rho = _ratio(_sv_max(l[k:, k:]), sigma_k_l11)

    if block12 == "strict-zero":
        correction = 0.0
    else:
        if rho >= 1.0:
            return BoundEntry(
                f"leading_sv_ratio_{_block12_tag(block12)}",
                0.0,
                math.inf,
                **meta,
                strict=False,
                note=f"inactive: rho={rho:.6g} >= 1 leaves the correction undefined",
            )
        r12_norm = _sv_max(factors.first_stage_r[:k, k:])
        correction = r12_norm**2 / ((1.0 - rho**2) * sigma_k_l11**2)

    ratios = [
        _ratio(float(l11_svs[i - 1]), ctx.sigma(i)) for i in range(1, k + 1)
    ]
    floors = [
        (1.0 - correction)
        * _ratio_floor(ctx.delta(i) ** (2 * q + 1) * blocks.coupling)
        for i in range(1, k + 1)
    ]
    i_w = _worst_index(floors, ratios)
    return BoundEntry(
        f"leading_sv_ratio_{_block12_tag(block12)}",
        floors[i_w],
        ratios[i_w],
        **meta,
        strict=False,
        note=f"rho={rho:.6g}; worst index i={i_w + 1}",
    )


def _block12_tag(block12):
    return "zero" if block12 == "strict-zero" else "r12"


def tail_constant(d, p, n2, upsilon):
    """Gaussian tail constant of the probabilistic guarantees.

    ``(e * sqrt(d) / (p + 1)) * (2 / upsilon)^(1 / (p + 1))
    * (sqrt(n2 - d + p) + sqrt(d) + sqrt(2 * ln(2 / upsilon)))``.
    """
    d = check_count(d, "d", minimum=1)
    p = check_count(p, "p", minimum=0)
    n2 = check_count(n2, "n2", minimum=max(1, d - p))
    upsilon = check_fraction(upsilon, "upsilon")
    lead = math.e * math.sqrt(d) / (p + 1)
    amplification = (2.0 / upsilon) ** (1.0 / (p + 1))
    spread = math.sqrt(n2 - d + p) + math.sqrt(d) + math.sqrt(2.0 * math.log(2.0 / upsilon))
    return lead * amplification * spread


def eval_highprob_bounds(a, trials, ctx, seed=0):
    """Monte Carlo check of the probabilistic guarantees.

    Runs ``trials`` independent factorizations (seeds ``seed``,
    ``seed + 1``, ...), records each run's three probabilistic inequalities
    as non-strict audit entries (any single run may violate them with
    probability up to ``upsilon``), and appends one strict summary entry per
    inequality asserting that the empirical violation frequency stays within
    ``upsilon + 3 * sqrt(upsilon * (1 - upsilon) / trials)``.

    Also records, per run and without pass/fail, the subspace-distance growth
    factors whose absolute constants are unknown, and the trailing-block
    variant with the tighter ``sigma_{k+1}`` first term alongside the looser
    ``sigma_k`` one that is asserted.
    """
    a = check_matrix(a, "a")
    trials = check_count(trials, "trials", minimum=1)
    seed = int(seed)
    n1, n2 = a.shape
    k, d, p, q = ctx.k, ctx.d, ctx.p, ctx.q
    c_tail = tail_constant(d, p, n2, ctx.upsilon)

    sigma1 = ctx.sigma(1)
    sigma_k = ctx.sigma(k)
    sigma_k1 = ctx.sigma(k + 1)
    tail_term = ctx.delta(k) ** (2 * q + 2) * sigma1 * c_tail
    gap = min(_ratio(sigma_k1, sigma_k), 1.0)
    dist_scale = math.sqrt(k * max(n1 - k, 0))
    floors = [
        _ratio_floor(ctx.delta(i) ** (2 * q + 1) * c_tail)
        for i in range(1, k + 1)
    ]

    tracked = ("hp_trailing_block", "hp_sv_ratio", "hp_range_error")
    violation_counts = dict.fromkeys(tracked, 0)
    entries = []
    for trial in range(trials):
        trial_seed = seed + trial
        factors = pbp_qlp(a, d, q=q, seed=trial_seed)
        meta = {
            "seed": trial_seed,
            "n1": n1,
            "n2": n2,
            "k": k,
            "d": d,
            "p": p,
            "q": q,
        }
        r22_norm = _sv_max(factors.first_stage_r[k:, k:])
        l_svs = np.linalg.svd(factors.l, compute_uv=False)
        ratios = [_ratio(float(l_svs[i - 1]), ctx.sigma(i)) for i in range(1, k + 1)]
        i_w = _worst_index(floors, ratios)
        projector_gap = spectral_norm(
            a - factors.q_basis @ (factors.q_basis.T @ a)
        )
        trial_entries = [
            BoundEntry(
                "hp_trailing_block", r22_norm, sigma_k + tail_term, **meta, strict=False
            ),
            BoundEntry(
                "hp_sv_ratio",
                floors[i_w],
                ratios[i_w],
                **meta,
                strict=False,
                note=f"worst index i={i_w + 1}",
            ),
            BoundEntry(
                "hp_range_error", projector_gap, sigma_k1 + tail_term, **meta, strict=False
            ),
        ]
        for entry in trial_entries:
            if not entry.satisfied:
                violation_counts[entry.bound] += 1
        trial_entries.append(
            BoundEntry(
                "hp_trailing_block_tight",
                r22_norm,
                sigma_k1 + tail_term,
                **meta,
                strict=False,
                note="tighter first term, recorded for comparison",
            )
        )
        trial_entries.extend(
            [
                BoundEntry(
                    "hp_left_dist_factor",
                    subspace_distance(ctx.oracle.u[:, :k], factors.q_basis[:, :k]),
                    dist_scale * gap ** (2 * q + 2),
                    **meta,
                    strict=False,
                    note="absolute constant unknown, taken as 1",
                ),
                BoundEntry(
                    "hp_right_dist_factor",
                    subspace_distance(ctx.oracle.v[:, :k], factors.p_basis[:, :k]),
                    dist_scale * gap ** (2 * q + 1),
                    **meta,
                    strict=False,
                    note="absolute constant unknown, taken as 1",
                ),
            ]
        )
        entries.extend(trial_entries)

    summary_meta = {"seed": seed, "n1": n1, "n2": n2, "k": k, "d": d, "p": p, "q": q}
    entries.append(
        BoundEntry(
            "tail_constant",
            c_tail,
            c_tail,
            **summary_meta,
            strict=False,
            note=f"upsilon={ctx.upsilon!r}",
        )
    )
    frequency_cap = ctx.upsilon + 3.0 * math.sqrt(
        ctx.upsilon * (1.0 - ctx.upsilon) / trials
    )
    for bound in tracked:
        count = violation_counts[bound]
        entries.append(
            BoundEntry(
                f"hp_freq_{bound[3:]}",
                count / trials,
                frequency_cap,
                **summary_meta,
                note=f"{count} of {trials} trials violated",
            )
        )
    context = dict(summary_meta)
    context.update(
        {"upsilon": ctx.upsilon, "trials": trials, "tail_constant": c_tail}
    )
    return BoundReport(entries=entries, context=context)
