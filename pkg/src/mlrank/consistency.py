"""Bayes-predictor analysis of the surrogates on finite label distributions.

Everything here works conditionally on one instance: a
:class:`ConditionalDistribution` lists the label vectors that have positive
probability.  A :class:`PenaltyAssignment` fixes, per label vector ``y``,

* ``alpha(y)``: the weight of each (relevant, irrelevant) pair in the target
  ranking measure,
* ``beta_plus(y)`` / ``beta_minus(y)``: the per-label weights of the
  reweighted univariate surrogate.

From the pair (distribution, penalties) two families of statistics follow:

* ``phi`` marginals drive the surrogate: the conditional surrogate risk is
  ``sum_j phi_plus[j] * ell(f_j) + phi_minus[j] * ell(-f_j)``, separable per
  coordinate, which gives closed-form Bayes scores for the classical bases.
* ``delta`` marginals drive the target measure: its Bayes predictors are
  exactly the score vectors ordering labels consistently with the pairwise
  ``delta`` comparisons.

Consistency of the surrogate then reduces to sign agreement between the two
families (``check_consistency_on_distribution``), a necessary product
condition ``beta_plus * beta_minus = tau * alpha^2`` with a single constant
``tau`` (``necessary_condition_tau``, exact rational arithmetic for the
named schemes), and explicit counterexample generators for the schemes and
for the hinge base.

Trivial label vectors (all-positive or all-negative) generate no ranking
pairs, so they never enter the ``delta`` sums; they do enter the ``phi``
sums, querying only the weight side that exists for them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .losses import BaseLoss

MEASURES = ("ranking", "partial")


@dataclass(frozen=True)
class ConditionalDistribution:
    """Finite support over label vectors: ``atoms`` (m, c), ``probs`` (m,)."""

    atoms: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        atoms = np.asarray(self.atoms, dtype=np.float64)
        probs = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)
        if atoms.ndim != 2 or atoms.shape[1] < 2:
            raise ValueError("atoms must be (m, c) with c >= 2")
        if not np.all(np.abs(atoms) == 1.0):
            raise ValueError("atoms must take values in {-1, +1}")
        if probs.shape != (atoms.shape[0],):
            raise ValueError("probs must match the number of atoms")
        if np.any(probs <= 0.0):
            raise ValueError("atom probabilities must be strictly positive")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        if len({tuple(a) for a in atoms}) != atoms.shape[0]:
            raise ValueError("atoms must be distinct")

    @property
    def c(self) -> int:
        return self.atoms.shape[1]


@dataclass(frozen=True)
class PenaltyAssignment:
    """Pair weight ``alpha`` and label weights ``beta_plus`` / ``beta_minus``.

    Each callable maps a label vector to a positive float.  ``alpha`` is only
    ever queried on nontrivial vectors; the ``beta`` sides are queried on any
    vector that has a label of that sign.
    """

    alpha: Callable[[np.ndarray], float]
    beta_plus: Callable[[np.ndarray], float]
    beta_minus: Callable[[np.ndarray], float]


def _split_sizes(y: np.ndarray) -> tuple[int, int]:
    a = int((y > 0).sum())
    return a, y.size - a


def _pair_normalizer(y: np.ndarray) -> float:
    a, b = _split_sizes(y)
    if a == 0 or b == 0:
        raise ValueError("pair weight is undefined on trivial label vectors")
    return 1.0 / (a * b)


def scheme_assignment(kind: str) -> PenaltyAssignment:
    """Penalties of the named univariate schemes against the per-pair-averaged
    ranking measure (``alpha = 1 / (|S+| |S-|)``)."""

    def beta(y: np.ndarray, side: int) -> float:
        a, b = _split_sizes(y)
        c = y.size
        if kind == "u1":
            return 1.0 / c
        if kind == "u2":
            if a == 0 or b == 0:
                raise ValueError("u2 weights are undefined on trivial label vectors")
            return 1.0 / (a * b)
        if kind == "u3":
            count = a if side > 0 else b
            if count == 0:
                raise ValueError("u3 weight queried on an absent label side")
            return 1.0 / count
        if kind == "u4":
            if a == 0 or b == 0:
                raise ValueError("u4 weights are undefined on trivial label vectors")
            return 1.0 / min(a, b)
        raise ValueError(f"unknown scheme kind {kind!r}")

    return PenaltyAssignment(alpha=_pair_normalizer,
                             beta_plus=lambda y: beta(y, +1),
                             beta_minus=lambda y: beta(y, -1))


def uniform_assignment(value: float = 1.0) -> PenaltyAssignment:
    """All weights equal; useful for hand-built analyses."""
    const = lambda y: value
    return PenaltyAssignment(alpha=const, beta_plus=const, beta_minus=const)


@dataclass
class LabelStats:
    """``phi``/``delta`` marginals of one (distribution, penalties) pair.

    ``delta_pairwise[p, q, r, k]`` sums ``alpha(y) P(y)`` over nontrivial
    atoms with ``y_p = sigma_r`` and ``y_q = sigma_k`` where ``sigma_0 = +1``
    and ``sigma_1 = -1``.  ``alpha_mass`` is the common value of
    ``delta_plus[j] + delta_minus[j]``; ``trivial_mass`` is the probability
    excluded from the ``delta`` sums.
    """

    phi_plus: np.ndarray
    phi_minus: np.ndarray
    delta_plus: np.ndarray
    delta_minus: np.ndarray
    delta_pairwise: np.ndarray
    alpha_mass: float
    trivial_mass: float


def compute_stats(dist: ConditionalDistribution, penalties: PenaltyAssignment) -> LabelStats:
    c = dist.c
    phi_plus = np.zeros(c)
    phi_minus = np.zeros(c)
    delta_plus = np.zeros(c)
    delta_minus = np.zeros(c)
    delta_pairwise = np.zeros((c, c, 2, 2))
    alpha_mass = 0.0
    trivial_mass = 0.0
    for y, p in zip(dist.atoms, dist.probs):
        pos = y > 0
        neg = ~pos
        if pos.any():
            phi_plus[pos] += penalties.beta_plus(y) * p
        if neg.any():
            phi_minus[neg] += penalties.beta_minus(y) * p
        if pos.any() and neg.any():
            ap = penalties.alpha(y) * p
            alpha_mass += ap
            delta_plus[pos] += ap
            delta_minus[neg] += ap
            r = np.where(pos, 0, 1)
            delta_pairwise[np.arange(c)[:, None], np.arange(c)[None, :],
                           r[:, None], r[None, :]] += ap
        else:
            trivial_mass += p
    return LabelStats(phi_plus, phi_minus, delta_plus, delta_minus,
                      delta_pairwise, alpha_mass, trivial_mass)


def conditional_risk(scores, dist: ConditionalDistribution,
                     penalties: PenaltyAssignment, base: BaseLoss) -> float:
    """Conditional reweighted surrogate risk ``sum_j phi+ ell(f_j) + phi- ell(-f_j)``."""
    stats = compute_stats(dist, penalties)
    return conditional_risk_from_stats(scores, stats, base)


def conditional_risk_from_stats(scores, stats: LabelStats, base: BaseLoss) -> float:
    f = np.asarray(scores, dtype=np.float64)
    # phi == 0 must kill the term even when the loss value is infinite
    pos_term = np.where(stats.phi_plus > 0.0, stats.phi_plus * base.value(f), 0.0)
    neg_term = np.where(stats.phi_minus > 0.0, stats.phi_minus * base.value(-f), 0.0)
    return float(pos_term.sum() + neg_term.sum())


def zero_one_conditional_risk(scores, dist: ConditionalDistribution,
                              penalties: PenaltyAssignment, measure: str = "partial") -> float:
    """Conditional risk of the weighted (partial) ranking measure, by enumeration."""
    if measure not in MEASURES:
        raise ValueError(f"measure must be one of {MEASURES}")
    f = np.asarray(scores, dtype=np.float64)
    total = 0.0
    for y, p in zip(dist.atoms, dist.probs):
        pos = np.flatnonzero(y > 0)
        neg = np.flatnonzero(y < 0)
        if pos.size == 0 or neg.size == 0:
            continue
        diffs = f[pos][:, None] - f[neg][None, :]
        if measure == "ranking":
            wrong = (diffs <= 0.0).sum()
        else:
            wrong = (diffs < 0.0).sum() + 0.5 * (diffs == 0.0).sum()
        total += penalties.alpha(y) * p * float(wrong)
    return total


# ---------------------------------------------------------------------------
# Bayes predictors of the surrogate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BayesPredictor:
    """Coordinatewise surrogate minimizer.

    ``scores`` may contain ``+-inf`` where one ``phi`` side vanishes.  For
    the hinge base a tie ``phi_plus == phi_minus`` leaves a whole interval of
    minimizers; such coordinates are flagged in ``unspecified`` and their
    ``scores`` entry is meaningless.
    """

    scores: np.ndarray
    unspecified: np.ndarray


def bayes_surrogate(dist: ConditionalDistribution, penalties: PenaltyAssignment,
                    base: BaseLoss) -> BayesPredictor:
    """Closed-form minimizer of the conditional reweighted surrogate risk."""
    stats = compute_stats(dist, penalties)
    pp, pm = stats.phi_plus, stats.phi_minus
    if np.any((pp == 0.0) & (pm == 0.0)):
        raise ValueError("a label has zero mass on both sides; scores there are arbitrary")
    unspecified = np.zeros(dist.c, dtype=bool)
    if base.kind in ("exponential", "logistic"):
        scale = 0.5 if base.kind == "exponential" else 1.0
        with np.errstate(divide="ignore"):
            scores = scale * (np.log(pp) - np.log(pm))
    elif base.kind == "squared_hinge":
        scores = (pp - pm) / (pp + pm)
    elif base.kind == "hinge":
        scores = np.where(pp > pm, 1.0, -1.0)
        unspecified = pp == pm
        scores = np.where(unspecified, 0.0, scores)
    else:
        raise ValueError(f"no closed-form Bayes predictor registered for base {base.kind!r}; "
                         "use bayes_numeric_oracle")
    return BayesPredictor(scores, unspecified)


def bayes_numeric_oracle(dist: ConditionalDistribution, penalties: PenaltyAssignment,
                         base: BaseLoss, lo: float = -50.0, hi: float = 50.0,
                         tol: float = 1e-8) -> np.ndarray:
    """Golden-section minimizer of each coordinate's conditional risk.

    Independent of the closed forms: only evaluates the base loss.  The
    per-coordinate objective ``phi+ ell(z) + phi- ell(-z)`` is convex, so
    golden section on ``[lo, hi]`` localizes a minimizer to width ``tol``.
    """
    stats = compute_stats(dist, penalties)
    pp, pm = stats.phi_plus, stats.phi_minus

    def g(z: np.ndarray) -> np.ndarray:
        return pp * base.value(z) + pm * base.value(-z)

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a = np.full(dist.c, lo)
    b = np.full(dist.c, hi)
    while np.max(b - a) > tol:
        x1 = b - invphi * (b - a)
        x2 = a + invphi * (b - a)
        shrink_right = g(x1) < g(x2)  # minimum lies in [a, x2]
        b = np.where(shrink_right, x2, b)
        a = np.where(shrink_right, a, x1)
    return (a + b) / 2.0


# ---------------------------------------------------------------------------
# Bayes predictors of the target measure, and membership
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairRequirement:
    """Ordering the target measure demands between two label scores."""

    p: int
    q: int
    relation: str  # ">", "<", or "!="
    delta_pm: float
    delta_mp: float

    def satisfied(self, fp: float, fq: float) -> bool:
        if self.relation == ">":
            return fp > fq
        if self.relation == "<":
            return fp < fq
        return fp != fq


def measure_requirements(stats: LabelStats, measure: str = "partial",
                         tol: float = 1e-12) -> list[PairRequirement]:
    """Pairwise score constraints characterizing the measure's Bayes set.

    For each label pair, ``delta_pairwise`` decides the optimal order: the
    side with smaller opposing mass must be ranked higher.  Under the partial
    measure a tie in mass makes any order optimal; under the full ranking
    measure equal scores additionally pay both sides, so ties in score are
    suboptimal whenever mass is present.
    """
    if measure not in MEASURES:
        raise ValueError(f"measure must be one of {MEASURES}")
    reqs: list[PairRequirement] = []
    c = stats.delta_pairwise.shape[0]
    for p in range(c):
        for q in range(p + 1, c):
            dpm = float(stats.delta_pairwise[p, q, 0, 1])
            dmp = float(stats.delta_pairwise[p, q, 1, 0])
            if dpm > dmp + tol:
                reqs.append(PairRequirement(p, q, ">", dpm, dmp))
            elif dmp > dpm + tol:
                reqs.append(PairRequirement(p, q, "<", dpm, dmp))
            elif measure == "ranking" and max(dpm, dmp) > tol:
                reqs.append(PairRequirement(p, q, "!=", dpm, dmp))
    return reqs


@dataclass
class MembershipReport:
    """Outcome of testing a score vector against the measure's Bayes set.

    ``member`` is ``None`` when the verdict hinges on coordinates the
    surrogate minimizer leaves unspecified and no tested assignment settles
    it; those constraints are listed in ``unresolved`` rather than classified.
    """

    member: bool | None
    violations: list[PairRequirement]
    unresolved: list[PairRequirement]
    scores: np.ndarray


_UNSPECIFIED_CANDIDATES = (-1.0, 0.0, 1.0)


def zero_one_bayes_membership(predictor, dist: ConditionalDistribution,
                              penalties: PenaltyAssignment, measure: str = "partial",
                              tol: float = 1e-12) -> MembershipReport:
    """Does a (possibly partially unspecified) score vector minimize the measure?

    ``predictor`` is a plain score vector or a :class:`BayesPredictor`.
    Unspecified coordinates are resolved by searching assignments over
    ``{-1, 0, +1}``; if some assignment meets every requirement the vector
    counts as a member.
    """
    stats = compute_stats(dist, penalties)
    reqs = measure_requirements(stats, measure, tol)
    if isinstance(predictor, BayesPredictor):
        scores = np.asarray(predictor.scores, dtype=np.float64).copy()
        free = np.flatnonzero(predictor.unspecified)
    else:
        scores = np.asarray(predictor, dtype=np.float64).copy()
        free = np.array([], dtype=np.int64)

    if free.size == 0:
        violations = [r for r in reqs if not r.satisfied(scores[r.p], scores[r.q])]
        return MembershipReport(not violations, violations, [], scores)

    best_scores = None
    best_violations: list[PairRequirement] | None = None
    for assignment in itertools.product(_UNSPECIFIED_CANDIDATES, repeat=free.size):
        trial = scores.copy()
        trial[free] = assignment
        violations = [r for r in reqs if not r.satisfied(trial[r.p], trial[r.q])]
        if not violations:
            return MembershipReport(True, [], [], trial)
        if best_violations is None or len(violations) < len(best_violations):
            best_scores, best_violations = trial, violations

    free_set = set(free.tolist())
    involves_free = [r for r in best_violations if r.p in free_set or r.q in free_set]
    hard = [r for r in best_violations if r.p not in free_set and r.q not in free_set]
    if hard:
        return MembershipReport(False, hard, involves_free, best_scores)
    return MembershipReport(None, [], involves_free, best_scores)


# ---------------------------------------------------------------------------
# Sign-agreement audit
# ---------------------------------------------------------------------------

_MONOTONE_BASES = ("exponential", "logistic", "squared_hinge")


@dataclass(frozen=True)
class PairWitness:
    """A label pair where measure and surrogate demand opposite orders."""

    p: int
    q: int
    delta_products: tuple[float, float]  # (delta+_p delta-_q, delta-_p delta+_q)
    phi_products: tuple[float, float]    # (phi+_p phi-_q,   phi-_p phi+_q)


@dataclass
class ConsistencyVerdict:
    consistent: bool
    witness: PairWitness | None
    stats: LabelStats


def check_consistency_on_distribution(dist: ConditionalDistribution,
                                      penalties: PenaltyAssignment,
                                      base: BaseLoss | None = None,
                                      tol: float = 1e-12) -> ConsistencyVerdict:
    """Audit one distribution for a Bayes-ordering conflict.

    The surrogate's Bayes scores (for bases whose closed form is strictly
    increasing in ``phi_plus / phi_minus``: exponential, logistic, squared
    hinge) rank ``p`` above ``q`` iff ``phi+_p phi-_q > phi-_p phi+_q``, and
    the measure demands that order iff ``delta+_p delta-_q > delta-_p
    delta+_q``.  A pair where the measure requires a strict order and the
    surrogate does not deliver it witnesses inconsistency at this
    distribution.
    """
    if base is not None and base.kind not in _MONOTONE_BASES:
        raise ValueError(f"audit applies to bases with a strictly monotone Bayes link "
                         f"{_MONOTONE_BASES}, not {base.kind!r}")
    stats = compute_stats(dist, penalties)
    dp, dm = stats.delta_plus, stats.delta_minus
    pp, pm = stats.phi_plus, stats.phi_minus
    c = dist.c
    for p in range(c):
        for q in range(c):
            if p == q:
                continue
            delta_hi, delta_lo = float(dp[p] * dm[q]), float(dm[p] * dp[q])
            phi_hi, phi_lo = float(pp[p] * pm[q]), float(pm[p] * pp[q])
            if delta_hi - delta_lo > tol and not (phi_hi - phi_lo > tol):
                witness = PairWitness(p, q, (delta_hi, delta_lo), (phi_hi, phi_lo))
                return ConsistencyVerdict(False, witness, stats)
    return ConsistencyVerdict(True, None, stats)


# ---------------------------------------------------------------------------
# Necessary product condition and constructive counterexamples
# ---------------------------------------------------------------------------


@dataclass
class TauCheck:
    """Result of testing ``beta_plus(y) beta_minus(y) = tau * alpha(y)^2``."""

    holds: bool
    tau: Fraction | float | None
    witness: tuple | None  # (id1, id2, ratio1, ratio2) on failure


def scheme_product_ratio(kind: str, n_pos: int, c: int) -> Fraction:
    """Exact ``beta+ beta- / alpha^2`` for a label vector with ``n_pos``
    relevant labels out of ``c``, under the named scheme."""
    if not 1 <= n_pos <= c - 1:
        raise ValueError("ratio defined for nontrivial split sizes only")
    k, b = n_pos, c - n_pos
    pairs = k * b  # alpha = 1 / pairs
    if kind == "u1":
        return Fraction(pairs * pairs, c * c)
    if kind == "u2":
        return Fraction(1)
    if kind == "u3":
        return Fraction(pairs)
    if kind == "u4":
        return Fraction(pairs * pairs, min(k, b) ** 2)
    raise ValueError(f"unknown scheme kind {kind!r}")


def necessary_condition_tau(penalties, c: int) -> TauCheck:
    """Test the product condition over every nontrivial label vector.

    ``penalties`` is a scheme kind string (exact rational arithmetic; the
    ratio depends only on the split size) or a :class:`PenaltyAssignment`
    (float enumeration over all ``2^c - 2`` nontrivial vectors, ``c <= 20``).
    """
    if isinstance(penalties, str):
        ratios = [(k, scheme_product_ratio(penalties, k, c)) for k in range(1, c)]
        first_k, first_r = ratios[0]
        for k, r in ratios[1:]:
            if r != first_r:
                return TauCheck(False, None, (first_k, k, first_r, r))
        return TauCheck(True, first_r, None)

    if c > 20:
        raise ValueError("enumeration over label vectors is capped at c = 20")
    first: tuple[np.ndarray, float] | None = None
    for bits in itertools.product((1.0, -1.0), repeat=c):
        y = np.array(bits)
        a, b = _split_sizes(y)
        if a == 0 or b == 0:
            continue
        r = penalties.beta_plus(y) * penalties.beta_minus(y) / penalties.alpha(y) ** 2
        if first is None:
            first = (y, r)
        elif abs(r - first[1]) > 1e-12 * max(abs(r), abs(first[1]), 1.0):
            return TauCheck(False, None, (first[0], y, first[1], r))
    if first is None:
        raise ValueError("no nontrivial label vectors at this c")
    return TauCheck(True, first[1], None)


def _ratio_bounds_for_classes(kind_or_penalties, y_a: np.ndarray, y_b: np.ndarray
                              ) -> tuple[float, float]:
    """(mass-ratio sign flip points) ``t_phi < t_delta`` for atoms ``a``, ``b``."""
    if isinstance(kind_or_penalties, str):
        pen = scheme_assignment(kind_or_penalties)
    else:
        pen = kind_or_penalties
    alpha_a, alpha_b = pen.alpha(y_a), pen.alpha(y_b)
    prod_a = pen.beta_plus(y_a) * pen.beta_minus(y_a)
    prod_b = pen.beta_plus(y_b) * pen.beta_minus(y_b)
    t_delta = alpha_a / alpha_b
    t_phi = float(np.sqrt(prod_a / prod_b))
    return t_phi, t_delta


def _opposing_pair(y_a: np.ndarray, y_b: np.ndarray) -> tuple[int, int] | None:
    """A label pair (p, q) with ``y_a = (+, -)`` and ``y_b = (-, +)`` there."""
    p_candidates = np.flatnonzero((y_a > 0) & (y_b < 0))
    q_candidates = np.flatnonzero((y_a < 0) & (y_b > 0))
    if p_candidates.size and q_candidates.size:
        return int(p_candidates[0]), int(q_candidates[0])
    return None


def tau_witness_distribution(penalties, c: int) -> ConditionalDistribution:
    """Two-atom distribution on which penalties failing the product condition
    provably violate the sign-agreement audit.

    The atoms oppose each other on some label pair (p, q): atom A carries
    ``+`` at p and ``-`` at q, atom B the reverse.  With only these two
    atoms, the measure demands p above q iff ``alpha_A P_A > alpha_B P_B``
    while the surrogate's Bayes scores deliver it iff ``beta+_A beta-_A
    P_A^2 > beta+_B beta-_B P_B^2``; differing product ratios separate the
    two critical mass ratios, and any mass strictly between them is a
    violation.  The midpoint is used.
    """
    check = necessary_condition_tau(penalties, c)
    if check.holds:
        raise ValueError("penalties satisfy the product condition; no witness exists")

    if isinstance(penalties, str):
        k1, k2, r1, r2 = check.witness
        if r1 > r2:  # atom A must have the smaller product ratio
            k1, k2 = k2, k1
        y_a = -np.ones(c)
        y_a[0] = 1.0
        extra = k1 - 1
        if k2 + 1 + extra > c:
            raise ValueError(f"split sizes {k1} and {k2} do not fit disjointly at c={c}")
        if extra:
            y_a[k2 + 1:k2 + 1 + extra] = 1.0
        y_b = -np.ones(c)
        y_b[1:k2 + 1] = 1.0
    else:
        pool = enumerate_label_vectors(c)
        ratios = [penalties.beta_plus(y) * penalties.beta_minus(y) / penalties.alpha(y) ** 2
                  for y in pool]
        found = None
        for i, j in itertools.combinations(range(len(pool)), 2):
            if abs(ratios[i] - ratios[j]) <= 1e-12 * max(abs(ratios[i]), abs(ratios[j]), 1.0):
                continue
            a, b = (i, j) if ratios[i] < ratios[j] else (j, i)
            if _opposing_pair(pool[a], pool[b]) is not None:
                found = (pool[a], pool[b])
                break
        if found is None:
            raise ValueError("no pair of opposing atoms with differing product ratios; "
                             "two-atom construction unavailable for these penalties")
        y_a, y_b = found

    t_phi, t_delta = _ratio_bounds_for_classes(penalties, y_a, y_b)
    if not t_phi < t_delta:
        raise ValueError("critical ratios are not separated; construction failed")
    t = 0.5 * (t_phi + t_delta)  # mass ratio P(B) / P(A)
    p_a = 1.0 / (1.0 + t)
    return ConditionalDistribution(np.vstack([y_a, y_b]), np.array([p_a, 1.0 - p_a]))


@dataclass
class HingeCounterexampleRecord:
    """A two-label distribution where the hinge Bayes scores tie two labels
    the measure must separate."""

    dist: ConditionalDistribution
    penalties: PenaltyAssignment
    epsilon: float
    bayes: BayesPredictor
    membership: MembershipReport


def hinge_counterexample(masses: tuple[float, float] = (0.2, 0.1),
                         penalties: PenaltyAssignment | None = None
                         ) -> HingeCounterexampleRecord:
    """Construct the hinge inconsistency witness at ``c = 2``.

    Support: ``y1 = (+1, +1)`` with the bulk of the mass, plus the two
    single-positive vectors ``y2 = (+1, -1)`` and ``y3 = (-1, +1)`` with
    ``masses``.  When the total perturbation is small enough both hinge
    Bayes scores are forced to ``+1``, yet unequal weighted masses on
    ``y2`` / ``y3`` force a strict order between the labels.

    Raises ``ValueError`` when the masses are too large to pin the hinge
    scores or when the weighted masses coincide (no strict order required,
    hence no counterexample).
    """
    pen = penalties if penalties is not None else uniform_assignment()
    m2, m3 = float(masses[0]), float(masses[1])
    if m2 <= 0.0 or m3 <= 0.0:
        raise ValueError("both perturbation masses must be positive")
    y1 = np.array([1.0, 1.0])
    y2 = np.array([1.0, -1.0])
    y3 = np.array([-1.0, 1.0])
    eps = m2 + m3
    eps_max = pen.beta_plus(y1) / (pen.beta_plus(y1)
                                   + max(pen.beta_minus(y2), pen.beta_minus(y3)))
    if eps >= eps_max:
        raise ValueError(f"total perturbation {eps} must stay below {eps_max:.6g} "
                         "to pin both hinge scores at +1")
    if abs(pen.alpha(y2) * m2 - pen.alpha(y3) * m3) <= 1e-15:
        raise ValueError("weighted masses of the single-positive atoms must differ; "
                         "equal masses demand no strict order")
    dist = ConditionalDistribution(np.vstack([y1, y2, y3]), np.array([1.0 - eps, m2, m3]))
    bayes = bayes_surrogate(dist, pen, BaseLoss("hinge"))
    membership = zero_one_bayes_membership(bayes, dist, pen, measure="partial")
    return HingeCounterexampleRecord(dist, pen, eps, bayes, membership)


# ---------------------------------------------------------------------------
# Randomized search
# ---------------------------------------------------------------------------


def enumerate_label_vectors(c: int, nontrivial_only: bool = True) -> np.ndarray:
    if c > 12:
        raise ValueError("label vector enumeration is capped at c = 12")
    atoms = np.array(list(itertools.product((1.0, -1.0), repeat=c)))
    if nontrivial_only:
        pos = (atoms > 0).sum(axis=1)
        atoms = atoms[(pos > 0) & (pos < c)]
    return atoms


@dataclass
class ViolationRecord:
    trial: int
    dist: ConditionalDistribution
    witness: PairWitness


@dataclass
class SearchResult:
    trials: int
    violations: list[ViolationRecord] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return bool(self.violations)


def random_violation_search(penalties, c: int, trials: int, seed: int = 0,
                            base: BaseLoss | None = None,
                            max_support: int = 8, tol: float = 1e-12) -> SearchResult:
    """Sample random conditional distributions and audit each for violations.

    ``penalties`` is a scheme kind string or a :class:`PenaltyAssignment`.
    Trial 0 is the constructive two-atom witness whenever the product
    condition fails, so a failing scheme is always caught; remaining trials
    draw a support of 2..``max_support`` nontrivial atoms without
    replacement and flat simplex probabilities.  Each trial's randomness is
    seeded independently from ``(seed, trial)``, so any partition of the
    trial range over workers returns identical results.
    """
    pen = scheme_assignment(penalties) if isinstance(penalties, str) else penalties
    atoms_pool = enumerate_label_vectors(c)
    hi = min(len(atoms_pool), max_support)
    result = SearchResult(trials=trials)
    tau = necessary_condition_tau(penalties if isinstance(penalties, str) else pen, c)
    constructive: ConditionalDistribution | None = None
    if not tau.holds:
        try:
            constructive = tau_witness_distribution(
                penalties if isinstance(penalties, str) else pen, c)
        except ValueError:
            constructive = None  # fall back to a plain random trial 0
    for trial in range(trials):
        if trial == 0 and constructive is not None:
            dist = constructive
        else:
            rng = np.random.default_rng((seed, trial))
            size = int(rng.integers(2, hi + 1))
            idx = rng.choice(len(atoms_pool), size=size, replace=False)
            probs = rng.dirichlet(np.ones(size))
            # dirichlet can emit exact zeros in extreme draws; nudge and renormalize
            probs = np.maximum(probs, 1e-12)
            probs = probs / probs.sum()
            dist = ConditionalDistribution(atoms_pool[idx], probs)
        verdict = check_consistency_on_distribution(dist, pen, base, tol)
        if not verdict.consistent:
            result.violations.append(ViolationRecord(trial, dist, verdict.witness))
    return result
