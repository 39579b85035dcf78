"""Three problems: the envelope, the client-worst equilibrium and its
recommend-and-accept twin.

Run: python demos/02_three_treatments.py
"""

import numpy as np

from credence import (
    benefit_test,
    client_worst_equilibrium,
    envelope_profit,
    flw_from_client_worst,
    flw_verify,
    p_equilibrium_value,
    qcav,
    validate_model,
    verify_p_equilibrium,
)
from credence.equilibrium import dumps_profile

model = validate_model(losses=[1.0, 2.0, 3.0], costs=[0.2, 0.8, 2.2])
prior = np.full(3, 1 / 3)

print(f"no-talk profit {envelope_profit(model, prior):.4f}")
env = qcav(model, prior)
print(f"envelope {env.value:.6f} reached by splitting into {env.splitting.k} posteriors:")
for (w, mu), i in zip(env.splitting, env.indices):
    print(f"  weight {w:.4f}  posterior {np.round(mu, 4)}  sells treatment {i}")

verdict = benefit_test(model, prior)
print(f"\nbenefit test: {verdict.verdict.value} (profit {verdict.profit:.3f} vs second surplus {verdict.second_surplus:.3f})")

prof = client_worst_equilibrium(model, prior, env)
report = verify_p_equilibrium(model, prior, prof)
print(f"\nclient-worst profile verified: {report.passed}")
print(f"  client payoff {prof.client_payoff:.4f} equals no-service value {-prior @ model.losses:.4f}")
print(dumps_profile(prof, digits=6))

# No other price list lets the expert do better.
rng = np.random.default_rng(0)
best = max(p_equilibrium_value(model, prior, rng.uniform(0, 4, 3)) for _ in range(200))
print(f"\nbest of 200 random price lists: {best:.4f} (envelope {env.value:.4f})")

flw = flw_from_client_worst(model, prior, prof)
print("\nuniform prices", np.round(flw.prices.prices, 4))
print("recommendation odds by type (columns a_0..a_3):")
print(np.round(flw.recommendation, 4))
print("recommend-and-accept profile verified:", flw_verify(model, prior, flw).passed)
