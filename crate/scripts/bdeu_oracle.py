"""Generate BDeu reference values with 50-digit arithmetic.

Writes crates/core/tests/fixtures/bdeu_oracle.json: a list of random count
tables with the BDeu log score evaluated directly from the Gamma formula.
"""
import json
import random
import sys

import mpmath

mpmath.mp.dps = 50


def bdeu(counts, q, r, ess):
    a_j = mpmath.mpf(ess) / q
    a_jk = mpmath.mpf(ess) / (q * r)
    s = mpmath.mpf(0)
    for row in counts:
        n_j = sum(row)
        s += mpmath.loggamma(a_j) - mpmath.loggamma(a_j + n_j)
        for n in row:
            s += mpmath.loggamma(a_jk + n) - mpmath.loggamma(a_jk)
    return s


def main(path):
    rng = random.Random(20240611)
    cases = []
    for _ in range(100):
        r = rng.randint(2, 5)
        q = rng.choice([1, 2, 3, 4, 6, 8, 9, 12, 27])
        ess = rng.choice([0.1, 1.0, 2.5, 10.0])
        observed = rng.randint(1, q)
        rows = []
        for _ in range(observed):
            scale = rng.choice([0, 3, 40, 700])
            rows.append([rng.randint(0, scale) for _ in range(r)])
        cases.append({
            "child_cardinality": r,
            "parent_config_count": q,
            "ess": ess,
            "rows": rows,
            "score": mpmath.nstr(bdeu(rows, q, r, ess), 30),
        })
    with open(path, "w") as f:
        f.write("[\n" + ",\n".join(json.dumps(c) for c in cases) + "\n]\n")


if __name__ == "__main__":
    main(sys.argv[1])
