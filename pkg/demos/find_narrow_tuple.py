"""Search for a narrow admissible 105-tuple by iterated local search.

The tuple in data/admissible_105_600.json was produced by this script with
the default arguments (seed 1).  A tuple fits in [0, H] when, for each
prime p <= k, one residue class a_p is removed from {0, ..., H} and at
least k integers survive.  Each round re-picks a_p, prime by prime, to
cover as few current survivors as possible; between rounds a few a_p are
perturbed at random and the result is kept if it does no worse.

Usage: python demos/find_narrow_tuple.py [seed] [H] [k]
"""

import json
import random
import sys

import numpy as np

from primegap import Tuple, build_prime_table, is_admissible


def main(seed=1, H=600, k=105, max_iter=200_000):
    ps = [p for p in range(2, k + 1) if all(p % q for q in range(2, int(p**0.5) + 1))]
    xs = np.arange(H + 1)
    hit = {p: np.stack([xs % p == a for a in range(p)]).astype(np.int32) for p in ps}
    rng = random.Random(seed)

    def descend(r):
        cover = sum(hit[q][r[q]] for q in ps)
        improved = True
        while improved:
            improved = False
            order = ps[:]
            rng.shuffle(order)
            for p in order:
                rest = cover - hit[p][r[p]]
                counts = hit[p] @ (rest == 0)
                m = counts.min()
                new = rng.choice([a for a in range(p) if counts[a] == m])
                if counts[new] < counts[r[p]]:
                    improved = True
                r[p] = new
                cover = rest + hit[p][new]
        return r, int((cover == 0).sum()), cover

    r = {p: rng.randrange(p) for p in ps}
    r, score, cover = descend(r)
    best = score
    for it in range(max_iter):
        trial = dict(r)
        for p in rng.sample(ps, rng.randint(1, 4)):
            trial[p] = rng.randrange(p)
        trial, s2, cov2 = descend(trial)
        if s2 >= score:
            r, score, cover = trial, s2, cov2
            if score > best:
                best = score
                print(f"iteration {it}: {score} survivors", flush=True)
        if score >= k:
            survivors = [int(x) for x in xs[cover == 0]]
            break
    else:
        print(f"no {k}-tuple within [0, {H}] after {max_iter} rounds (best {best})")
        return None

    # any k consecutive survivors form an admissible tuple; keep the narrowest
    widths = [survivors[i + k - 1] - survivors[i] for i in range(len(survivors) - k + 1)]
    i = int(np.argmin(widths))
    t = Tuple(tuple(x - survivors[i] for x in survivors[i : i + k]))
    assert is_admissible(t, build_prime_table(k + 2))
    print(f"admissible {k}-tuple of diameter {t.diameter}")
    print(json.dumps(list(t.h)))
    return t


if __name__ == "__main__":
    args = [int(a) for a in sys.argv[1:]]
    main(*args)
