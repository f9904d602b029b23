"""Simulator for verifiable threshold secret sharing on a single qudit."""

from mubqss.errors import EnumerationTooLarge, ParameterError, ProtocolOrderError, QSSError, StateError
from mubqss.field import (
    BivariatePolynomial,
    PairwiseKey,
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
    MubLabel,
    QuditState,
    apply_xy,
    apply_xy_system,
    csum_entangle,
    inner_product,
    measure_mub,
    measure_mub_system,
    mub_vector,
)
from mubqss.protocol import Behavior, ProtocolTranscript, run_session
from mubqss.adversary import (
    AttackConfig,
    AttackStats,
    attack_collusion,
    attack_dishonest,
    attack_entangle_measure,
    attack_intercept_resend,
    run_attack,
)

__version__ = "0.1.0"
