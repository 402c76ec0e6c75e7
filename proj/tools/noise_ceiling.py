# Copyright 2026 The CPRL Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Monte Carlo ceiling for greedy hit rates under encoder noise.

Distortion and risk one-hots carry N(0, sigma^2) noise, so a policy can only
act on posteriors. This estimates what an ideal posterior policy scores on the
balanced eval grid (8 types x 3 intensities x {Low, Medium}) when trained under
the default type prior. Two policies are scored: the one maximizing gold
probability, and a myopic reward-optimal one that weighs gold, silver and
mismatch by their immediate reward plus expected improvement.

    python3 tools/noise_ceiling.py --sigma 0.5
"""

import argparse

import numpy as np

GOLD = [8, 4, 1, 6, 7, 2, 3, 5]
SILVER = [[0, 3], [0, 2], [8, 2], [0, 3], [0, 5], [0, 1], [0, 8], [0, 7]]
# Immediate reward plus expected improvement signal per match class.
GOLD_VALUE = 1.8 + 0.8
SILVER_VALUE = 0.2 + 0.4
MISMATCH_VALUE = -0.5 - 0.15
INTENSITY_BONUS = np.array([-0.8, 0.0, 1.2])  # Mild, Moderate, Severe
PRIOR = np.array([0.369, 0.128, 0.0706, 0.150, 0.0706, 0.0706, 0.0706, 0.0706])


def posterior(x, sigma, log_prior):
    logits = x / sigma**2 + log_prior
    p = np.exp(logits - logits.max(axis=1, keepdims=True))
    return p / p.sum(axis=1, keepdims=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sigma", type=float, default=0.5)
    ap.add_argument("--samples", type=int, default=400_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    gold = np.zeros((8, 10))
    silver = np.zeros((8, 10))
    for k in range(8):
        gold[k, GOLD[k]] = 1
        silver[k, SILVER[k]] = 1
    hit = gold + silver

    rng = np.random.default_rng(args.seed)
    n, s = args.samples, args.sigma
    rows = np.arange(n)
    types = rng.integers(0, 8, n)
    x = rng.normal(0, s, (n, 8))
    x[rows, types] += 1
    risk = rng.integers(0, 2, n)
    r = rng.normal(0, s, (n, 3))
    r[rows, risk] += 1
    intensity = rng.integers(0, 3, n)
    v = rng.normal(0, s, (n, 3))
    v[rows, intensity] += 1

    p_type = posterior(x, s, np.log(PRIOR / PRIOR.sum()))
    p_high = posterior(r, s, np.zeros(3))[:, 2]
    p_intensity = posterior(v, s, np.zeros(3))
    best_gold = np.argmax(p_type @ gold, axis=1)
    p_gold, p_silver = p_type @ gold, p_type @ silver
    utility = (p_gold * (GOLD_VALUE + (p_intensity @ INTENSITY_BONUS)[:, None])
               + p_silver * SILVER_VALUE + (1 - p_gold - p_silver) * MISMATCH_VALUE)
    best_reward = np.argmax(utility, axis=1)

    def score(actions):
        return gold[types, actions].mean(), hit[types, actions].mean()

    print(f"sigma={s}")
    print("policy                      gold    gold+silver")
    for name, base in (("max gold probability", best_gold), ("myopic reward-optimal", best_reward)):
        for thr in (None, 0.48):
            actions = base if thr is None else np.where(p_high > thr, 9, base)
            g, gs = score(actions)
            label = name if thr is None else f"  + A9 if P(High) > {thr}"
            print(f"{label:<26}  {g:.4f}  {gs:.4f}")


if __name__ == "__main__":
    main()
