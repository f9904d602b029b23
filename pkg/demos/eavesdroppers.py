"""Two eavesdroppers on the quantum channel and one cheating insider.

Rates come with a 3-sigma binomial band so runs at different seeds can be
compared at a glance.
"""

from mubqss import SchemeParams
from mubqss.adversary import attack_dishonest, attack_entangle_measure, attack_intercept_resend, ci3

TRIALS = 3000
params = SchemeParams(5, 3, 3)
d = params.d


def show(label, rate, expected):
    print(f"  {label:<22} {rate:.4f}  (theory {expected:.4f} +/- {ci3(expected, TRIALS):.4f})")


print(f"intercept-resend, d={d}, t=3, {TRIALS} trials")
for hop in range(3):
    st = attack_intercept_resend(params, 2, hop, seed=1, trials=TRIALS)
    print(f" hop {hop}")
    show("basis match", st.eve_basis_match_rate, 1 / d)
    show("caught", st.detection_rate, 1 - 1 / d - (d - 1) / d**2)
    # leaving the dealer, nothing has been added on top of S yet
    guess = (2 * d - 1) / d**2 if hop == 0 else 1 / d
    show("guessed S", st.eve_secret_guess_rate, guess)

print(f"\nentangle-measure (CSUM ancilla), d={d}")
st = attack_entangle_measure(params, 2, 1, seed=1, trials=TRIALS)
show("caught", st.detection_rate, 1 - 1 / d)
show("guessed S", st.eve_secret_guess_rate, 1 / d)

print("\ndishonest participant substitutes (p, q)")
for cheater in (1, 2, 3):
    st = attack_dishonest(params, 2, cheater, seed=1, trials=300)
    print(f"  Bob_{cheater}: caught {st.detection_rate:.3f}, named {st.cheater_identified_rate:.3f}")
