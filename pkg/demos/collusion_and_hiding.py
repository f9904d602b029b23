"""What t-1 insiders learn: enumerate every polynomial that fits their shares."""

from collections import Counter

from mubqss import SchemeParams
from mubqss.adversary import attack_collusion, hiding_table

params = SchemeParams(5, 3, 4)
st = attack_collusion(params, secret=3, colluders=[1, 4], seed=8)
print("colluders Bob_1 and Bob_4 at d=5, t=3")
print(f"  before the R broadcast: {st.posterior_pre_broadcast}")
print(f"  after it:               {st.posterior}")
print(f"  best guess hits S with probability {st.eve_secret_guess_rate:.3f}")

# across every possible view of one share at d=3, t=2
table = hiding_table(SchemeParams(3, 2, 2), [1])
shapes = Counter(tuple(sorted(c.values())) for c in table.values())
print(f"\n{len(table)} distinct single-share views at d=3, t=2; counts of F(0,0) per view: {dict(shapes)}")
