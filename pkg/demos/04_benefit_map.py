"""Where on the simplex does talk help?  A sweep over priors, and a model
with non-monotone losses where the second-surplus rule misreads the map.

Run: python demos/04_benefit_map.py
"""

import numpy as np

from credence import SimplexGrid, Verdict, benefit_test, envelope_profit, qcav, validate_model


def sweep(model, mesh):
    rows = []
    for prior in SimplexGrid(model.n, mesh).points:
        if np.any(prior == 0):
            continue
        gain = qcav(model, prior).value - envelope_profit(model, prior)
        rows.append((prior, gain, benefit_test(model, prior).verdict))
    return rows


ordered = validate_model(losses=[1.0, 2.0, 3.0], costs=[0.2, 0.8, 2.2])
rows = sweep(ordered, 12)
agree = sum((gain > 1e-7) == (v is Verdict.TRUE) for _, gain, v in rows if v is not Verdict.BOUNDARY)
print(f"increasing losses: {len(rows)} interior priors, rule and envelope agree on {agree}")

# Treatment 3 also cures type 2, whose loss is larger than type 3's.
bumpy = validate_model(losses=[0.6, 1.5, 1.1], costs=[0.1, 0.5, 0.7])
rows = sweep(bumpy, 10)
missed = [(p, g) for p, g, v in rows if v is Verdict.FALSE and g > 1e-7]
print(f"non-monotone losses: {len(missed)} of {len(rows)} priors gain from talk although the rule says no")
for prior, gain in missed[:5]:
    print(f"  prior {np.round(prior, 2)}  gain {gain:.4f}")
