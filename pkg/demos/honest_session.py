"""Walk one honest round by hand, then let run_session do the same thing."""

import numpy as np

from mubqss import SchemeParams, run_session
from mubqss.field import BivariatePolynomial, lagrange_at_zero
from mubqss.protocol import classical_exchange, distribution_step, prepare
from mubqss.qudit import mub_probabilities

d, t = 5, 2
params = SchemeParams(d, t, 2)
F = BivariatePolynomial.from_matrix([[1, 3], [2, 4]], d)  # 1 + 3y + 2x + 4xy
secret = 4

dealer, parts, state = prepare(params, secret, (1, 2), np.random.default_rng(0), F=F)
print(f"s = F(0,0) = {dealer.s}, dealer prepares |v_{dealer.p0}^({dealer.q0})>")
for p in parts:
    print(f"  Bob_{p.index}: x = {p.share.point}, p = F(x,x) = {p.p}, q = F(x,0) = {p.q}")

# each participant shifts the label by (p_i, q_i)
for p in parts:
    state = distribution_step(p, state)
probs = mub_probabilities(state, dealer.s)
print(f"outcome distribution in basis s: {np.round(probs, 12).tolist()}")

classical_exchange(parts, d)
last = parts[-1]
s_prime = lagrange_at_zero([(params.point(i), last.received_q.get(i, last.q)) for i in (1, 2)], d)
print(f"Bob_{last.index} reconstructs s' = {s_prime} from the decrypted q values")

tr = run_session(params, secret, (1, 2), None, 0, F=F)
print(f"measured R' = {tr.R_prime}, verdicts passed = {tr.verdicts.passed}")
print(f"recovered: {tr.recovered}")

# the same thing at a bigger size with a random polynomial
big = SchemeParams(11, 4, 8)
tr = run_session(big, 7, (8, 3, 5, 1), None, 2026)
print(f"d=11, t=4, recovery set (8,3,5,1): recovered {sorted(set(tr.recovered.values()))}, aborted={tr.aborted}")
