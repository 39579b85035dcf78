"""Two problems, two treatments: where talking pays and who gains from it.

Run: python demos/01_binary_market.py
"""

import numpy as np

from credence import (
    closed_form_qcav,
    qcav,
    qhat,
    services_value,
    solve_above,
    solve_below,
    validate_model,
    verify_p_equilibrium,
)

model = validate_model(losses=[1.0, 2.0], costs=[0.2, 0.8])
t = qhat(model)
print(f"surpluses {model.surpluses}, threshold q_hat = {t:.3f}")

# Envelope along the prior weight on the serious problem.
print("\n   q    no-talk   envelope  closed form")
for q in np.linspace(0.0, 1.0, 11):
    env = qcav(model, [1 - q, q])
    base = max(0.0, *(np.cumsum(np.array([1 - q, q]) * model.losses) - model.costs))
    print(f"{q:5.2f}  {base:8.4f}  {env.value:9.4f}  {closed_form_qcav(model, q):10.4f}")

# Above the threshold there is one equilibrium and it is silent.
above = solve_above(model, 0.7)
prof = above.equilibria[0]
print(f"\nq = 0.7: {above.regime.value}, prices {prof.prices.prices}, expert {prof.expert_payoff:.3f}")

# Below it the splitting is a choice; each choice has its own equilibria.
q = 0.5
for spec in ([0.6], [0.8], [1.0], [0.7, 0.9]):
    res = solve_below(model, q, spec)
    print(f"\nupper posteriors {spec}: {len(res.equilibria)} equilibria")
    for prof in res.equilibria:
        ok = verify_p_equilibrium(model, [1 - q, q], prof).passed
        print(
            f"  {prof.kind.value:12s} prices {np.round(prof.prices.prices, 3)}"
            f"  expert {prof.expert_payoff:.3f}  client gain {services_value(model, q, prof):.3f}  verified {ok}"
        )

# The client's gain ranges over an interval fixed by total surplus and the envelope.
ws = np.linspace(t, 1.0, 6)
gains = [services_value(model, q, solve_below(model, q, [w]).equilibria[-1]) for w in ws]
print("\nclient gain as the upper posterior moves from q_hat to 1:", np.round(gains, 4))
print("interval reported by the solver:", solve_below(model, q, [1.0]).value_interval)
