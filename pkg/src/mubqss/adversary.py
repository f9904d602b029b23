"""Attack scenarios against the protocol and what each adversary learns.

Channel attacks (intercept-resend, entangle-measure) are taps on
:func:`mubqss.protocol.run_session`; participant attacks are behavior
substitutions.  Collusion is analysed exactly, by enumerating every coefficient
matrix consistent with the colluders' shares.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from mubqss.errors import EnumerationTooLarge, ParameterError
from mubqss.field import BivariatePolynomial, SchemeParams, poly_eval, poly_random, share_generate
from mubqss.protocol import (
    AnyState,
    Behavior,
    distribution_step,
    prepare,
    run_session,
)
from mubqss.qudit import QuditState, csum_entangle, measure_ancilla, measure_mub

ATTACK_KINDS = ("dishonest-participant", "intercept-resend", "entangle-measure", "collusion")
DEFAULT_ENUMERATION_CAP = 10**8
_CHUNK = 1 << 16


@dataclass
class AttackConfig:
    kind: str
    position: int | Sequence[int] = 0
    trials: int = 1000
    seed: int = 0

    def validate(self, params: SchemeParams) -> None:
        if self.kind not in ATTACK_KINDS:
            raise ParameterError(f"unknown attack kind {self.kind!r}")
        if self.trials < 1:
            raise ParameterError("trials must be positive")
        if self.kind in ("intercept-resend", "entangle-measure"):
            if not 0 <= int(self.position) < params.t:
                raise ParameterError(f"hop must lie in 0..{params.t - 1}")
        elif self.kind == "dishonest-participant":
            if not 1 <= int(self.position) <= params.t:
                raise ParameterError(f"cheater must be one of the recovery set 1..{params.t}")
        else:
            colluders = list(self.position)
            if len(colluders) != params.t - 1 or len(set(colluders)) != len(colluders):
                raise ParameterError(f"collusion needs exactly t-1 = {params.t - 1} distinct participants")
            for c in colluders:
                params.check_index(c)


@dataclass
class AttackStats:
    """Outcome of an attack experiment.  Rates that do not apply are ``None``."""

    kind: str
    trials: int
    seed: int
    eve_basis_match_rate: float | None = None
    eve_secret_guess_rate: float | None = None
    detection_rate: float | None = None
    cheater_identified_rate: float | None = None
    posterior: dict[int, int] | None = None
    posterior_pre_broadcast: dict[int, int] | None = None
    position: int | list[int] | None = None

    def to_dict(self) -> dict:
        def post(p):
            return None if p is None else {str(k): v for k, v in sorted(p.items())}

        return {
            "kind": self.kind,
            "trials": self.trials,
            "eve_basis_match_rate": self.eve_basis_match_rate,
            "eve_secret_guess_rate": self.eve_secret_guess_rate,
            "detection_rate": self.detection_rate,
            "cheater_identified_rate": self.cheater_identified_rate,
            "posterior": post(self.posterior),
            "posterior_pre_broadcast": post(self.posterior_pre_broadcast),
            "position": self.position,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent generator for one trial, derived from (master seed, trial index)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))


def ci3(rate: float, trials: int) -> float:
    """Three-sigma binomial half-width."""
    return 3.0 * math.sqrt(max(rate * (1.0 - rate), 0.0) / trials)


def _recovery_set(params: SchemeParams) -> tuple[int, ...]:
    return tuple(range(1, params.t + 1))


def _random_other(value: int, d: int, rng: np.random.Generator) -> int:
    """Uniform element of F_d distinct from ``value``."""
    return (value + 1 + int(rng.integers(d - 1))) % d


# -- dishonest participant --------------------------------------------------

def attack_dishonest(params: SchemeParams, secret: int, cheater: int, seed: int, trials: int) -> AttackStats:
    """Cheater replaces both p and q by uniformly random wrong values."""
    rs = _recovery_set(params)
    if cheater not in rs:
        raise ParameterError(f"cheater {cheater} is not in the recovery set {rs}")
    detected = identified = 0
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        F = poly_random(params, rng)
        x = params.point(cheater)
        p_fake = _random_other(poly_eval(F, x, x), params.d, rng)
        q_fake = _random_other(poly_eval(F, x, 0), params.d, rng)
        tr = run_session(params, secret, rs, Behavior(substitutions={cheater: (p_fake, q_fake)}), rng, F=F)
        v = tr.verdicts
        detected += not all(v.s_check.values())
        identified += cheater in v.p_crosscheck
    return AttackStats(
        kind="dishonest-participant", trials=trials, seed=seed, position=cheater,
        detection_rate=detected / trials, cheater_identified_rate=identified / trials,
    )


# -- intercept and resend ----------------------------------------------------

@dataclass
class InterceptResendTap:
    """Measure the in-flight qudit in a uniformly random basis and forward the collapse."""

    d: int
    basis: int | None = None
    outcome: int | None = None

    def __call__(self, state: AnyState, rng: np.random.Generator) -> QuditState:
        self.basis = int(rng.integers(self.d))
        self.outcome, post = measure_mub(state, self.basis, rng)
        return post


def cumulative_indices(tr, hop: int) -> tuple[int, int]:
    """(vector index, basis index) of the honest state on ``hop``."""
    dealer = tr.dealer
    d = dealer.params.d
    l, j = dealer.p0, dealer.q0
    for part in tr.participants[:hop]:
        l, j = (l + part.p) % d, (j + part.q) % d
    return l, j


def attack_intercept_resend(params: SchemeParams, secret: int, hop: int, seed: int, trials: int) -> AttackStats:
    """Eve guesses the secret as her raw outcome; only at hop 0 does it equal S on a basis match."""
    rs = _recovery_set(params)
    match = guessed = detected = 0
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        tap = InterceptResendTap(params.d)
        tr = run_session(params, secret, rs, Behavior(taps={hop: tap}), rng)
        _, j = cumulative_indices(tr, hop)
        match += tap.basis == j
        guessed += tap.outcome == tr.secret
        detected += not tr.verdicts.passed
    return AttackStats(
        kind="intercept-resend", trials=trials, seed=seed, position=hop,
        eve_basis_match_rate=match / trials, eve_secret_guess_rate=guessed / trials,
        detection_rate=detected / trials,
    )


# -- entangle and measure ----------------------------------------------------

def csum_tap(state: AnyState, rng: np.random.Generator) -> AnyState:
    return csum_entangle(state)


def pre_measurement_state(
    params: SchemeParams,
    secret: int,
    hop: int,
    rng: np.random.Generator,
    F: BivariatePolynomial | None = None,
):
    """Run preparation and distribution with a CSUM tap at ``hop``.

    Returns ``(state, dealer, participants)`` with the two-qudit state just
    before the final measurement.
    """
    dealer, parts, state = prepare(params, secret, _recovery_set(params), rng, F=F)
    for h, part in enumerate(parts):
        if h == hop:
            state = csum_entangle(state)
        state = distribution_step(part, state)
    return state, dealer, parts


def attack_entangle_measure(params: SchemeParams, secret: int, hop: int, seed: int, trials: int) -> AttackStats:
    """Eve couples an ancilla with CSUM, then reads it in the computational basis."""
    rs = _recovery_set(params)
    guessed = detected = 0
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        tr = run_session(params, secret, rs, Behavior(taps={hop: csum_tap}), rng)
        eve_outcome, _ = measure_ancilla(tr.final_state, rng)
        guessed += eve_outcome == tr.secret
        detected += not tr.verdicts.passed
    return AttackStats(
        kind="entangle-measure", trials=trials, seed=seed, position=hop,
        eve_secret_guess_rate=guessed / trials, detection_rate=detected / trials,
    )


# -- exhaustive enumeration ---------------------------------------------------

def _check_cap(d: int, t: int, cap: int) -> int:
    total = d ** (t * t)
    if total > cap:
        raise EnumerationTooLarge(f"d^(t^2) = {total} candidate polynomials exceeds cap {cap}")
    return total


def iter_coefficient_blocks(d: int, t: int, cap: int = DEFAULT_ENUMERATION_CAP):
    """Yield every t-by-t matrix over F_d, in blocks of shape (N, t, t)."""
    total = _check_cap(d, t, cap)
    places = d ** np.arange(t * t, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = (idx[:, None] // places) % d
        yield digits.reshape(-1, t, t)


def _powers(x: int, t: int, d: int) -> np.ndarray:
    return np.array([pow(int(x), k, d) for k in range(t)], dtype=np.int64)


def _eval_block(A: np.ndarray, x: int, y: int, d: int) -> np.ndarray:
    t = A.shape[1]
    return np.einsum("nab,a,b->n", A, _powers(x, t, d), _powers(y, t, d)) % d


def _share_block(A: np.ndarray, x: int, d: int) -> np.ndarray:
    """Row and column polynomials of every matrix at abscissa x, stacked (N, 2t)."""
    pw = _powers(x, A.shape[1], d)
    rows = np.einsum("nab,a->nb", A, pw) % d
    cols = np.einsum("nab,b->na", A, pw) % d
    return np.concatenate([rows, cols], axis=1)


def consistent_polynomials(
    params: SchemeParams,
    shares: dict,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> np.ndarray:
    """All coefficient matrices reproducing the given shares exactly.

    ``shares`` maps participant index to a :class:`~mubqss.field.Share`.
    """
    d, t = params.d, params.t
    targets = [(params.point(i), np.array(sh.row_poly + sh.col_poly, dtype=np.int64)) for i, sh in shares.items()]
    found = []
    for A in iter_coefficient_blocks(d, t, cap):
        mask = np.ones(len(A), dtype=bool)
        for x, target in targets:
            mask &= np.all(_share_block(A, x, d) == target, axis=1)
        if mask.any():
            found.append(A[mask])
    return np.concatenate(found) if found else np.zeros((0, t, t), dtype=np.int64)


def collusion_posteriors(
    params: SchemeParams,
    colluders: Sequence[int],
    honest: int,
    F: BivariatePolynomial,
    R_prime: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> tuple[dict[int, int], dict[int, int]]:
    """Secret posteriors of t-1 colluders who pool their shares and their p_i.

    After the broadcast the colluders hold R' and every p except the honest
    participant's, so each consistent polynomial implies one candidate
    S = R' - sum p_colluders - F(x_h, x_h).  Before the broadcast S is not tied
    to F at all and every (polynomial, S) pair is consistent.
    """
    d = params.d
    shares = {c: share_generate(F, params, c) for c in colluders}
    pooled_p = sum(sh.row_at(sh.point) for sh in shares.values()) % d
    cands = consistent_polynomials(params, shares, cap)
    xh = params.point(honest)
    p_honest = _eval_block(cands, xh, xh, d)
    implied = (R_prime - pooled_p - p_honest) % d
    post = Counter({s: 0 for s in range(d)})
    post.update(int(s) for s in implied)
    pre = {s: len(cands) for s in range(d)}
    return dict(post), pre


def attack_collusion(
    params: SchemeParams,
    secret: int,
    colluders: Sequence[int],
    seed: int,
    honest: int | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> AttackStats:
    """Honest-but-curious colluders follow the protocol, then pool what they know."""
    colluders = [int(c) for c in colluders]
    if len(colluders) != params.t - 1 or len(set(colluders)) != len(colluders):
        raise ParameterError(f"collusion needs exactly t-1 = {params.t - 1} distinct participants")
    for c in colluders:
        params.check_index(c)
    if honest is None:
        honest = next(i for i in range(1, params.n + 1) if i not in colluders)
    _check_cap(params.d, params.t, cap)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed)]))
    tr = run_session(params, secret, colluders + [honest], None, rng)
    post, pre = collusion_posteriors(params, colluders, honest, tr.dealer.F, tr.R_prime, cap)
    return AttackStats(
        kind="collusion", trials=1, seed=seed, position=colluders,
        eve_secret_guess_rate=max(post.values()) / sum(post.values()),
        posterior=post, posterior_pre_broadcast=pre,
    )


def hiding_table(params: SchemeParams, coalition: Sequence[int], cap: int = DEFAULT_ENUMERATION_CAP) -> dict:
    """For every possible share view of ``coalition``, count polynomials per F(0, 0).

    Returns ``{view: Counter}`` where ``view`` is the tuple of the coalition's
    row and column coefficients.
    """
    d = params.d
    table: dict[tuple, Counter] = {}
    for A in iter_coefficient_blocks(d, params.t, cap):
        views = np.concatenate([_share_block(A, params.point(c), d) for c in coalition], axis=1)
        consts = A[:, 0, 0]
        for view, s in zip(map(tuple, views.tolist()), consts.tolist()):
            table.setdefault(view, Counter())[s] += 1
    return table


def run_attack(config: AttackConfig, params: SchemeParams, secret: int) -> AttackStats:
    config.validate(params)
    if config.kind == "dishonest-participant":
        return attack_dishonest(params, secret, int(config.position), config.seed, config.trials)
    if config.kind == "intercept-resend":
        return attack_intercept_resend(params, secret, int(config.position), config.seed, config.trials)
    if config.kind == "entangle-measure":
        return attack_entangle_measure(params, secret, int(config.position), config.seed, config.trials)
    return attack_collusion(params, secret, list(config.position), config.seed)
