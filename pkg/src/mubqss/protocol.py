"""One session of the verifiable (t, n) sharing protocol on a single qudit.

Party 0 is the dealer; participants are numbered 1..n and a session involves an
ordered recovery set of exactly t of them.  The quantum state travels

    dealer -> Bob_r1 -> Bob_r2 -> ... -> Bob_rt

and hop ``h`` (0-based) is the channel leaving the h-th party on that path
(hop 0 leaves the dealer).  Adversaries hook in through :class:`Behavior`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence, Union

import numpy as np

from mubqss.errors import ParameterError, ProtocolOrderError, QSSError
from mubqss.field import (
    BivariatePolynomial,
    SchemeParams,
    Share,
    lagrange_at_zero,
    otp_decrypt,
    otp_encrypt,
    pairwise_key,
    poly_eval,
    poly_random,
    share_generate,
)
from mubqss.qudit import (
    BipartiteState,
    QuditState,
    apply_xy,
    apply_xy_system,
    measure_mub,
    measure_mub_system,
    mub_vector,
)

DEALER = 0
PHASES = ("preparation", "distribution", "measurement", "testing", "recovery")
MESSAGE_KINDS = ("p-cipher", "q-cipher", "R-cipher", "s-report")

AnyState = Union[QuditState, BipartiteState]
Tap = Callable[[AnyState, np.random.Generator], AnyState]


@dataclass
class DealerState:
    params: SchemeParams
    F: BivariatePolynomial
    secret: int
    recovery_set: tuple[int, ...]
    s: int
    p0: int
    q0: int

    @property
    def R(self) -> int:
        """Expected honest measurement result p0 + sum F(x_i, x_i)."""
        d = self.params.d
        return (self.p0 + sum(poly_eval(self.F, x, x) for x in self._xs())) % d

    def _xs(self) -> list[int]:
        return [self.params.point(i) for i in self.recovery_set]

    def true_pq(self, i: int) -> tuple[int, int]:
        x = self.params.point(i)
        return poly_eval(self.F, x, x), poly_eval(self.F, x, 0)


@dataclass
class ParticipantState:
    index: int
    share: Share
    p: int
    q: int
    keys_send: dict[int, int] = field(default_factory=dict)
    keys_recv: dict[int, int] = field(default_factory=dict)
    received_p: dict[int, int] = field(default_factory=dict)
    received_q: dict[int, int] = field(default_factory=dict)
    received_R: int | None = None
    s_prime: int | None = None
    honest: bool = True
    substitute: tuple[int, int] | None = None

    @property
    def used_p(self) -> int:
        return self.substitute[0] if self.substitute is not None else self.p

    @property
    def used_q(self) -> int:
        return self.substitute[1] if self.substitute is not None else self.q


@dataclass(frozen=True)
class ClassicalMessage:
    sender: int
    receiver: int
    kind: str
    payload: int

    def to_dict(self) -> dict:
        return {"from": self.sender, "to": self.receiver, "kind": self.kind, "payload": self.payload}


@dataclass
class Behavior:
    """Deviations from the honest run.

    ``substitutions`` maps a participant to the (p, q) it uses in place of its true
    values, both in its unitary and in the classical exchange.  ``forged_R`` makes
    the last participant send that value instead of its measurement result.
    ``taps`` maps a hop index to a function applied to the in-flight state.
    """

    substitutions: Mapping[int, tuple[int, int]] = field(default_factory=dict)
    forged_R: int | None = None
    taps: Mapping[int, Tap] = field(default_factory=dict)


@dataclass
class Verdicts:
    s_check: dict[int, bool] = field(default_factory=dict)
    p_crosscheck: list[int] = field(default_factory=list)
    R_check: bool = True
    convicted: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.s_check.values()) and not self.p_crosscheck and self.R_check

    def to_dict(self) -> dict:
        return {
            "s_check": {str(k): v for k, v in self.s_check.items()},
            "p_crosscheck": list(self.p_crosscheck),
            "R_check": self.R_check,
            "convicted": list(self.convicted),
        }


@dataclass
class ProtocolTranscript:
    params: SchemeParams
    recovery_set: tuple[int, ...]
    secret: int
    seed: int | None = None
    phases: list[dict] = field(default_factory=list)
    s_prime: int | None = None
    R_prime: int | None = None
    verdicts: Verdicts = field(default_factory=Verdicts)
    recovered: dict[int, int] = field(default_factory=dict)
    aborted: str | None = None
    # live objects for harnesses; not serialized
    dealer: DealerState | None = field(default=None, repr=False)
    participants: list[ParticipantState] = field(default_factory=list, repr=False)
    final_state: AnyState | None = field(default=None, repr=False)
    messages: list[ClassicalMessage] = field(default_factory=list, repr=False)

    def phase(self, name: str) -> dict:
        entry = {"name": name, "events": []}
        self.phases.append(entry)
        return entry

    def log(self, event: dict) -> None:
        self.phases[-1]["events"].append(event)

    def record_message(self, msg: ClassicalMessage) -> None:
        self.messages.append(msg)
        self.log({"type": "message", **msg.to_dict()})

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "recovery_set": list(self.recovery_set),
            "secret_S": self.secret,
            "phases": self.phases,
            "measurement": {"s_prime": self.s_prime, "R_prime": self.R_prime},
            "verdicts": self.verdicts.to_dict(),
            "recovered": {str(k): v for k, v in self.recovered.items()},
            "aborted": self.aborted,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _check_recovery_set(params: SchemeParams, recovery_set: Sequence[int]) -> tuple[int, ...]:
    rs = tuple(int(i) for i in recovery_set)
    if len(rs) != params.t:
        raise ParameterError(f"recovery set must have exactly t={params.t} members, got {len(rs)}")
    if len(set(rs)) != len(rs):
        raise ParameterError("recovery set members must be distinct")
    for i in rs:
        params.check_index(i)
    return rs


def prepare(
    params: SchemeParams,
    secret: int,
    recovery_set: Sequence[int],
    rng: np.random.Generator,
    F: BivariatePolynomial | None = None,
) -> tuple[DealerState, list[ParticipantState], QuditState]:
    """Sample F, hand out shares and build the dealer's initial state |v_{p0}^(q0)>.

    ``F`` may be supplied to replay a fixed polynomial.  The returned participant
    list follows the order of ``recovery_set``.
    """
    rs = _check_recovery_set(params, recovery_set)
    d = params.d
    if F is None:
        F = poly_random(params, rng)
    elif F.d != d or F.size != params.t:
        raise ParameterError("supplied polynomial does not match the scheme parameters")
    secret = int(secret) % d
    s = poly_eval(F, 0, 0)
    q0 = (s - sum(poly_eval(F, params.point(i), 0) for i in rs)) % d
    dealer = DealerState(params, F, secret, rs, s, p0=secret, q0=q0)

    participants = []
    for i in rs:
        share = share_generate(F, params, i)
        part = ParticipantState(index=i, share=share, p=share.row_at(share.point), q=share.row_at(0))
        for j in rs:
            if j != i:
                part.keys_send[j] = pairwise_key(share, params, j, "send").key
                part.keys_recv[j] = pairwise_key(share, params, j, "receive").key
        participants.append(part)

    state = apply_xy(mub_vector(d, (0, 0)), dealer.p0, dealer.q0)
    return dealer, participants, state


def distribution_step(participant: ParticipantState, incoming: AnyState) -> AnyState:
    """Participant applies U_{p_i, q_i} (its substitute values if it cheats)."""
    p, q = participant.used_p, participant.used_q
    if isinstance(incoming, BipartiteState):
        return apply_xy_system(incoming, p, q)
    return apply_xy(incoming, p, q)


def classical_exchange(participants: Sequence[ParticipantState], d: int) -> list[ClassicalMessage]:
    """Every participant sends E(p_i), E(q_i) to every other one under k_ij = F(x_i, x_j)."""
    by_index = {part.index: part for part in participants}
    messages = []
    for sender in participants:
        for receiver in participants:
            if receiver.index == sender.index:
                continue
            key = sender.keys_send[receiver.index]
            for kind, value, store in (
                ("p-cipher", sender.used_p, receiver.received_p),
                ("q-cipher", sender.used_q, receiver.received_q),
            ):
                c = otp_encrypt(value, key, d)
                messages.append(ClassicalMessage(sender.index, receiver.index, kind, c))
                store[sender.index] = otp_decrypt(c, by_index[receiver.index].keys_recv[sender.index], d)
    return messages


def compute_s_prime(participant: ParticipantState, params: SchemeParams, recovery_set: Sequence[int]) -> int:
    """Interpolate s' = F(0, 0) from the participant's own and received q values."""
    points = []
    for i in recovery_set:
        if i == participant.index:
            q = participant.used_q
        elif i in participant.received_q:
            q = participant.received_q[i]
        else:
            raise ProtocolOrderError(f"Bob_{participant.index} has not received q from Bob_{i}")
        points.append((params.point(i), q))
    return lagrange_at_zero(points, params.d)


def measurement_phase(
    last: ParticipantState,
    state: AnyState,
    rng: np.random.Generator,
    params: SchemeParams,
    recovery_set: Sequence[int],
    forged_R: int | None = None,
) -> tuple[int, int, list[ClassicalMessage], AnyState]:
    """Last participant measures in basis s' and broadcasts E_{k_ti}(R').

    Returns ``(s', R', messages, post_state)``.
    """
    s_prime = compute_s_prime(last, params, recovery_set)
    last.s_prime = s_prime
    if isinstance(state, BipartiteState):
        r_prime, post = measure_mub_system(state, s_prime, rng)
    else:
        r_prime, post = measure_mub(state, s_prime, rng)
    last.received_R = r_prime
    sent = r_prime if forged_R is None else int(forged_R) % params.d
    messages = []
    for j in recovery_set:
        if j == last.index:
            continue
        messages.append(ClassicalMessage(last.index, j, "R-cipher", otp_encrypt(sent, last.keys_send[j], params.d)))
    return s_prime, r_prime, messages, post


def deliver_R(messages: Sequence[ClassicalMessage], participants: Sequence[ParticipantState], d: int) -> None:
    by_index = {part.index: part for part in participants}
    for msg in messages:
        receiver = by_index[msg.receiver]
        receiver.received_R = otp_decrypt(msg.payload, receiver.keys_recv[msg.sender], d)


def testing_phase(
    dealer: DealerState,
    participants: Sequence[ParticipantState],
    transcript: ProtocolTranscript | None = None,
) -> Verdicts:
    """Dealer-supervised checks: s' == s, sent/received (p, q) vs F, received R' == R."""
    params = dealer.params
    rs = dealer.recovery_set
    verdicts = Verdicts()

    for part in participants:
        if part.s_prime is None:
            part.s_prime = compute_s_prime(part, params, rs)
        if transcript is not None:
            transcript.record_message(ClassicalMessage(part.index, DEALER, "s-report", part.s_prime))
        verdicts.s_check[part.index] = part.s_prime == dealer.s

    # The dealer authored F, so every claimed and every received (p, q) is compared
    # against ground truth; a sender whose claim is wrong is accused, and so is a
    # receiver whose report disagrees with a truthful sender.
    accused: set[int] = set()
    for sender in participants:
        truth = dealer.true_pq(sender.index)
        if (sender.used_p, sender.used_q) != truth:
            accused.add(sender.index)
            continue
        for receiver in participants:
            if receiver.index == sender.index:
                continue
            got = (receiver.received_p.get(sender.index), receiver.received_q.get(sender.index))
            if got != truth:
                accused.add(receiver.index)
    verdicts.p_crosscheck = sorted(accused)

    R = dealer.R
    verdicts.R_check = all(part.received_R == R for part in participants)
    convicted = set(accused)
    if not verdicts.R_check and not accused:
        convicted.add(rs[-1])
    verdicts.convicted = sorted(convicted)
    return verdicts


def recovery_phase(participants: Sequence[ParticipantState], verdicts: Verdicts, d: int) -> dict[int, int]:
    """Each participant computes p0 = R' - sum p_i."""
    if not verdicts.passed:
        raise ProtocolOrderError("recovery requested after failed verdicts")
    recovered = {}
    for part in participants:
        if part.received_R is None:
            raise ProtocolOrderError(f"Bob_{part.index} has no measurement result")
        total = part.used_p + sum(part.received_p.values())
        recovered[part.index] = (part.received_R - total) % d
    return recovered


def _quantum_event(src: int, dst: int, hop: int, state: AnyState, dump: bool) -> dict:
    ev: dict[str, Any] = {"type": "quantum", "from": src, "to": dst, "hop": hop}
    if dump:
        ev["state"] = state.to_pairs()
    return ev


def run_session(
    params: SchemeParams,
    secret: int,
    recovery_set: Sequence[int],
    behavior: Behavior | None = None,
    rng: np.random.Generator | int | None = None,
    *,
    F: BivariatePolynomial | None = None,
    dump_states: bool = False,
) -> ProtocolTranscript:
    """Run all five phases and return the full transcript.

    Parameter errors propagate before any phase starts; any later simulator error
    ends the session with ``aborted`` set to the phase in which it occurred.
    """
    behavior = behavior or Behavior()
    rs = _check_recovery_set(params, recovery_set)
    for idx in behavior.substitutions:
        if idx not in rs:
            raise ParameterError(f"substituting participant {idx} is not in the recovery set")
    for hop in behavior.taps:
        if not 0 <= hop < params.t:
            raise ParameterError(f"hop {hop} outside 0..{params.t - 1}")
    seed = None
    if rng is None or isinstance(rng, (int, np.integer)):
        seed = None if rng is None else int(rng)
        rng = np.random.default_rng(seed)

    d = params.d
    tr = ProtocolTranscript(params=params, recovery_set=rs, secret=int(secret) % d, seed=seed)
    current = "preparation"
    try:
        tr.phase("preparation")
        dealer, parts, state = prepare(params, secret, rs, rng, F=F)
        tr.dealer, tr.participants = dealer, parts
        for part in parts:
            if part.index in behavior.substitutions:
                p, q = behavior.substitutions[part.index]
                part.substitute = (int(p) % d, int(q) % d)
                part.honest = False
        tr.log({"type": "polynomial", "coeffs": dealer.F.to_list()})
        tr.log({"type": "dealer", "s": dealer.s, "p0": dealer.p0, "q0": dealer.q0})
        for part in parts:
            tr.log({"type": "share", "to": part.index, **part.share.to_dict()})
        prepared = {"type": "prepared", "basis": dealer.q0, "vector": dealer.p0}
        if dump_states:
            prepared["state"] = state.to_pairs()
        tr.log(prepared)

        current = "distribution"
        tr.phase("distribution")
        path = (DEALER,) + rs
        for hop, part in enumerate(parts):
            tr.log(_quantum_event(path[hop], part.index, hop, state, dump_states))
            if hop in behavior.taps:
                state = behavior.taps[hop](state, rng)
                tr.log({"type": "tap", "hop": hop})
            state = distribution_step(part, state)
            tr.log({"type": "unitary", "party": part.index, "x": part.used_p, "y": part.used_q})
        msgs = classical_exchange(parts, d)
        for msg in msgs:
            tr.record_message(msg)

        current = "measurement"
        tr.phase("measurement")
        if dump_states:
            tr.log({"type": "pre-measurement", "state": state.to_pairs()})
        s_prime, r_prime, msgs, post = measurement_phase(parts[-1], state, rng, params, rs, behavior.forged_R)
        tr.s_prime, tr.R_prime, tr.final_state = s_prime, r_prime, post
        tr.log({"type": "measure", "party": parts[-1].index, "basis": s_prime, "outcome": r_prime})
        for msg in msgs:
            tr.record_message(msg)
        deliver_R(msgs, parts, d)

        current = "testing"
        tr.phase("testing")
        tr.verdicts = testing_phase(dealer, parts, tr)
        if not tr.verdicts.passed:
            tr.aborted = "testing"
            return tr

        current = "recovery"
        tr.phase("recovery")
        tr.recovered = recovery_phase(parts, tr.verdicts, d)
        for i, value in tr.recovered.items():
            tr.log({"type": "recovered", "party": i, "value": value})
    except QSSError as exc:
        if current == "preparation" and not tr.participants:
            raise
        tr.aborted = current
        tr.recovered = {}
        tr.log({"type": "fault", "error": str(exc)})
    return tr
