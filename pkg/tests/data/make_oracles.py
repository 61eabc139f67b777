"""Regenerate the frozen reference values used by the tests.

Run from the repository root:  python tests/data/make_oracles.py
Values come from the defining power series summed in mpmath with the working
precision raised until the alternating cancellation is absorbed.
"""

import json
import math
from pathlib import Path

import mpmath as mp

HERE = Path(__file__).parent

BETAS = (0.25, 0.5, 0.75, 0.9)
MUS = (-0.5, 0.0, 0.5, 1.0, 1.5)
ZS = (0.0, -0.5, -1.0, -5.0, -10.0, -30.0, -50.0)


def underflow_exponent(beta, z):
    """Saddle-point decay rate: |phi| ~ exp(-(1-beta) (beta^beta |z|)^(1/(1-beta)))."""
    return (1 - beta) * (beta**beta * abs(z)) ** (1 / (1 - beta))


def series(beta, mu, z, digits=50):
    """sum_k z^k / (k! Gamma(mu - beta k)) with enough guard digits."""
    if z == 0:
        return mp.rgamma(mu)
    lz = math.log(abs(z))
    peak, k = -math.inf, 0
    while True:
        a = mu - beta * k
        log_rg = math.lgamma(1 - a) if a < 0.5 else -math.lgamma(a)
        lt = k * lz - math.lgamma(k + 1) + log_rg
        peak = max(peak, lt)
        if k > 5 and lt < -3 * max(peak, 0) - 120:
            break
        k += 1
    # The sum can be as small as exp(-decay); budget for that too.
    decay = underflow_exponent(beta, z)
    dps = int((peak + decay) / math.log(10)) + digits + 20
    with mp.workdps(dps):
        zz, b, m = mp.mpf(z), mp.mpf(beta), mp.mpf(mu)
        term, total = mp.mpf(1), mp.mpf(0)
        for j in range(k + 10):
            total += term * mp.rgamma(m - b * j)
            term = term * zz / (j + 1)
        return +total


def main():
    rows = []
    for beta in BETAS:
        for mu in MUS:
            for z in ZS:
                log10_size = -underflow_exponent(beta, z) / math.log(10)
                if log10_size < -330:
                    # Far below the smallest double; summing would need
                    # millions of digits.  Record the magnitude estimate.
                    rows.append([beta, mu, z, "below_double", round(log10_size, 1)])
                else:
                    rows.append([beta, mu, z, mp.nstr(series(beta, mu, z), 30)])
    (HERE / "wright_oracle.json").write_text(json.dumps(rows, indent=0) + "\n")
    print(f"wrote {len(rows)} values")


if __name__ == "__main__":
    main()
