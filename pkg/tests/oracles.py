"""Reference values computed independently (mpmath at 50 digits, closed
forms by hand) before the library code existed, frozen here."""

import math

# quad_quartic G(x, y) = (x - y)^2 + y^4, v = (2, 3/2) on [0, 1]:
# 5.0625 s^2 + 0.25 s = 1 with s = alpha^-2
NORM_A = 2.0
NORM_A_PRIME = 1.5422287596738019

# G(x, y) = x^2 + y^4 on [0, pi]
NORM_B = math.sqrt(math.pi)                      # u = (1, 0)
# v = 1.1 (cos t, sqrt(sin t)): 1.4641 (pi/2) s^2 + 1.21 (pi/2) s = 1, alpha = s^-1/2
NORM_B_COMPANION = 1.6552963116218668

# G*(1, 1) for quad_quartic: 1/4 + (3/4) 2 (2/4)^(1/3)
QQ_CONJ_11 = 1.4405507889761496

# power(2), u = (t, 0) on [0, 1]
W1_LINEAR = 1.0 / math.sqrt(6.0) + 1.0 / math.sqrt(2.0)    # 1.1153550716504105
W1_ALT_LINEAR = math.sqrt(2.0 / 3.0)                       # 0.816496580927726


def qq_conjugate(a, b):
    """Even extension of the closed-form quad_quartic conjugate."""
    s = abs(a + b)
    return a * a / 4.0 + 0.75 * s * (s / 4.0) ** (1.0 / 3.0)
