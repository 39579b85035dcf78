"""Prices that depend on the problem leak information; fold them into the
message and the leak becomes ordinary talk.

Run: python demos/03_nonsignalling_prices.py
"""

from credence import SignalPricingPair, path_probabilities, relabeled_paths, transform_nonsignalling
from credence.alt_games import pricing_is_message_only

pair = SignalPricingPair(
    signalling={1: {"m1": 1.0}, 2: {"m1": 1.0}},
    pricing={(1, "m1"): (1.0, 1.6), (2, "m1"): (1.0, 1.8)},
)
print("original pricing depends on the message only:", pricing_is_message_only(pair))

out = transform_nonsignalling(pair)
for t, dist in out.signalling.items():
    for label, pr in dist.items():
        print(f"type {t} sends {label} with probability {pr}, price list {out.pricing[(t, label)]}")
print("transformed pricing depends on the message only:", pricing_is_message_only(out))
print("path probabilities unchanged:", relabeled_paths(pair, out) == path_probabilities(pair))
