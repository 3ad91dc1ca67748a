"""Norm of the Cayley transform of x = 2 e_2 - i over p in [1.05, 3].

Prints the closed-form value at (1, 0), the oracle norm, and the exponent
where the closed form drops through 1.
"""

import numpy as np
from scipy.optimize import brentq

from lpalg.gallery import cayley_counterexample_value, make_cayley_counterexample
from lpalg.pnorm import pnorm_oracle
from lpalg.transforms import cayley

k = cayley(make_cayley_counterexample(check_p=()))
print(f"{'p':>5} {'closed':>10} {'oracle':>10}")
for p in np.round(np.arange(1.05, 3.0001, 0.05), 10):
    print(f"{p:5.2f} {cayley_counterexample_value(p):10.6f} {pnorm_oracle(k, p).value:10.6f}")
cross = brentq(lambda p: cayley_counterexample_value(p) - 1.0, 1.0, 2.0, xtol=1e-14)
print(f"closed form equals 1 at p = {cross:.8f}")
