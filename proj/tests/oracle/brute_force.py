#!/usr/bin/env python3
"""Direct-summation oracle for the d-statistics and the null variance.

Reads the fixture pairs, evaluates every DFT term by term in 50-digit
arithmetic and writes tests/fixtures/golden.json. Shares no code with the
C++ library.

    python3 tests/oracle/brute_force.py
"""

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
PAIRS = ["pair1", "pair2", "pair3", "pair4", "pair5"]
CALIBRATION = mp.mpf(1) / 2


def load(path):
    return [mp.mpf(line.strip()) for line in path.read_text().splitlines() if line.strip()]


def center(x):
    m = mp.fsum(x) / len(x)
    return [v - m for v in x]


def dft(x, lam):
    # t runs from 1
    return mp.fsum(v * mp.expj(-lam * t) for t, v in enumerate(x, start=1))


def stats(a, b):
    if len(a) > len(b):
        a, b = b, a
        swapped = True
    else:
        swapped = False
    a, b = center(a), center(b)
    n1, n2 = len(a), len(b)
    K = n1 // 2
    lams = [2 * mp.pi * k / n1 for k in range(1, K + 1)]
    da = [dft(a, lam) for lam in lams]
    db = [dft(b, lam) for lam in lams]
    i1 = [abs(z) ** 2 / (2 * mp.pi * n1) for z in da]
    i2 = [abs(z) ** 2 / (2 * mp.pi * n2) for z in db]
    i12 = [za * mp.conj(zb) / (2 * mp.pi * mp.sqrt(n1 * n2)) for za, zb in zip(da, db)]

    d1 = mp.fsum(v * v for v in i1) / n1
    d2 = mp.fsum(v * v for v in i2) / n1
    d12 = mp.fsum(i1[k] * i2[k + 1] for k in range(K - 1)) / n1
    d_sq = (d1 + d2) / 2 - 2 * d12
    fourth = mp.fsum(v ** 4 for v in i1) + mp.fsum(v ** 4 for v in i2)
    cross = mp.fsum(i12[k] ** 2 * mp.conj(i12[k + 1]) ** 2 for k in range(K - 1))
    raw = fourth / (4 * n1) + mp.re(cross) / (2 * n1)
    return {
        "n1": n1,
        "n2": n2,
        "swapped": swapped,
        "d1": d1,
        "d2": d2,
        "d12": d12,
        "d_squared": d_sq,
        "r_squared": 2 * d_sq / (d1 + d2),
        "sigma2_h0_raw": raw,
        "sigma2_h0": max(mp.mpf(0), CALIBRATION * raw),
    }


def main():
    out = {}
    for name in PAIRS:
        s = stats(load(FIXTURES / f"{name}_a.csv"), load(FIXTURES / f"{name}_b.csv"))
        out[name] = {k: (mp.nstr(v, 20) if isinstance(v, mp.mpf) else v) for k, v in s.items()}
    (FIXTURES / "golden.json").write_text(json.dumps(out, indent=2) + "\n")


if __name__ == "__main__":
    main()
