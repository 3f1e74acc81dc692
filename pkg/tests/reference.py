"""Hand-derived reference values for the bundled models.

Everything here was worked out from scratch (2x2 spectral problems, classical
generating functions, triangular matrix powers) and deliberately avoids
importing the package under test, so these numbers can serve as independent
oracles.  Derivation notes are inline where the algebra is not obvious.
"""
import numpy as np

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)


def normal_cdf(x):
    """Standard normal CDF via math.erf (no scipy, to stay independent)."""
    from math import erf
    x = np.asarray(x, dtype=float)
    return 0.5 * (1.0 + np.vectorize(erf)(x / SQRT2))


# ---------------------------------------------------------------------------
# std_example: L_+ = [[1,1],[0,1]]/sqrt3, L_- = [[1,0],[-1,1]]/sqrt3.
# ---------------------------------------------------------------------------

STD_MEAN = 0.0
STD_VARIANCE = 8.0 / 9.0
# Traceless corrector eta solving (Id - L) eta = L' rho_inv (the drift term
# vanishes); solved by hand on the 3-dim traceless space.
STD_ETA = np.array([[5.0, 2.0], [2.0, -5.0]]) / 12.0
STD_INVARIANT = np.eye(2) / 2.0


def std_lambda(u):
    """Leading tilted eigenvalue, cube-root closed form.

    In the matrix-unit basis the tilted map is 4x4 with a cubic factor whose
    largest root is (ch + w**(1/3) - w**(-1/3)) / 3, where ch = e^u + e^-u
    and w = ch + sqrt(e^{2u} + e^{-2u} + 3).  At u = 0, w = 2 + sqrt(5) is
    the cube of the golden ratio and the expression collapses to 1.
    """
    u = np.asarray(u, dtype=float)
    ch = np.exp(u) + np.exp(-u)
    w = ch + np.sqrt(np.exp(2 * u) + np.exp(-2 * u) + 3.0)
    cbrt = np.cbrt(w)
    return (ch + cbrt - 1.0 / cbrt) / 3.0


# ---------------------------------------------------------------------------
# periodic_example: L_+ = [[0, sqrt3/2], [1/sqrt2, 0]], L_- = [[0, 1/2],
# [1/sqrt2, 0]].  Both operators are antidiagonal, so diagonal matrices are
# preserved by the tilted map; on that block it acts as [[0, A], [B, 0]] with
# A = (3 e^u + e^-u)/4 and B = (e^u + e^-u)/2, giving lambda_u = sqrt(A B).
# The off-diagonal block's radius is strictly smaller for every u
# (A B - A'^2 = (4 - 2 sqrt3)/8 * ... > 0), so sqrt(A B) is the true radius.
# ---------------------------------------------------------------------------

PERIODIC_MEAN = 0.25
PERIODIC_VARIANCE = 7.0 / 8.0
PERIODIC_INVARIANT = np.eye(2) / 2.0
PERIODIC_LAW_A = {(1,): 0.5, (-1,): 0.5}     # transitions out of ray e1
PERIODIC_LAW_B = {(1,): 0.75, (-1,): 0.25}   # transitions out of ray e2


def periodic_log_lambda(u):
    u = np.asarray(u, dtype=float)
    return 0.5 * (np.log(np.exp(u) + np.exp(-u))
                  + np.log(3.0 * np.exp(u) + np.exp(-u))) - 1.5 * np.log(2.0)


def periodic_maximizer(t):
    """argmax_u (t u - log lambda_u) for |t| < 1.

    Setting the derivative of t u - log lambda_u to zero in w = e^{2u} gives
    3 (1 - t) w^2 - 4 t w - (1 + t) = 0, whose positive root is
    w = (2 t + sqrt(t^2 + 3)) / (3 (1 - t)).
    """
    t = np.asarray(t, dtype=float)
    return 0.5 * np.log((2.0 * t + np.sqrt(t * t + 3.0)) / (3.0 * (1.0 - t)))


def periodic_rate(t):
    u = periodic_maximizer(t)
    return t * u - periodic_log_lambda(u)


# ---------------------------------------------------------------------------
# breakdown_example: L_+ = [[1/sqrt2, 1/(2 sqrt2)], [0, sqrt3/2]],
# L_- = [[1/sqrt2, -1/(2 sqrt2)], [0, 0]].  Upper triangular, common ray e1.
# The tilted spectrum is the union of the ray part (cosh u) and the corner
# part ((3/4) e^u); their crossing at u0 = log(2)/2 is a genuine kink.
# ---------------------------------------------------------------------------

BREAKDOWN_INVARIANT = np.diag([1.0, 0.0]).astype(float)
BREAKDOWN_MEAN = 0.0
BREAKDOWN_VARIANCE = 1.0
BREAKDOWN_LAW = {(1,): 0.5, (-1,): 0.5}      # classical law on the ray e1

BREAKDOWN_KINK_U = 0.5 * np.log(2.0)
# One-sided slopes of lambda_u at the kink: sinh(u0) = sqrt2/4 from the left,
# (3/4) e^{u0} = 3 sqrt2/4 from the right; divide by lambda(u0) = 3 sqrt2/4
# for the log-curve slopes 1/3 and 1.
BREAKDOWN_LAMBDA_SLOPES = (SQRT2 / 4.0, 3.0 * SQRT2 / 4.0)
BREAKDOWN_LOG_SLOPES = (1.0 / 3.0, 1.0)


def breakdown_lambda(u):
    u = np.asarray(u, dtype=float)
    return np.maximum(np.cosh(u), 0.75 * np.exp(u))


def breakdown_return_probability(n):
    """P(X_n = n) starting fully on the decaying ray e2.

    Equals ||L_+^n e2||^2.  For the triangular L_+ the n-th power has diagonal
    (a^n, c^n) and corner b (a^n - c^n)/(a - c) with a = 1/sqrt2, b =
    1/(2 sqrt2), c = sqrt3/2; factoring 2^-n out of the corner bracket gives
    the closed form below.
    """
    bracket = 2.0 ** (1 - n) * (SQRT3 ** n - SQRT2 ** n) / (SQRT3 - SQRT2)
    return 0.75 ** n + bracket ** 2 / 8.0


# ---------------------------------------------------------------------------
# antidiag_example: L_+ = [[0, .6], [.8, 0]], L_- = [[0, .8], [.6, 0]].
# Same antidiagonal block structure as the periodic example.
# ---------------------------------------------------------------------------

ANTIDIAG_MEAN = 0.0
ANTIDIAG_VARIANCE = 0.9216     # 1 - 0.28^2, same for both branch laws
ANTIDIAG_LAW_A = {(1,): 0.64, (-1,): 0.36}
ANTIDIAG_LAW_B = {(1,): 0.36, (-1,): 0.64}


def antidiag_log_lambda(u):
    u = np.asarray(u, dtype=float)
    return 0.5 * (np.log(0.36 * np.exp(u) + 0.64 * np.exp(-u))
                  + np.log(0.64 * np.exp(u) + 0.36 * np.exp(-u)))


# ---------------------------------------------------------------------------
# classical_dilation(p): 1x1 operators sqrt(p), sqrt(1-p) on steps +1 / -1.
# ---------------------------------------------------------------------------

def classical_mean(p):
    return 2.0 * p - 1.0


def classical_variance(p):
    return 4.0 * p * (1.0 - p)


def classical_log_lambda(u, p):
    u = np.asarray(u, dtype=float)
    return np.log(p * np.exp(u) + (1.0 - p) * np.exp(-u))


def binomial_mass(p_steps, j, q):
    """P(j rightward steps out of p_steps) for the classical walk."""
    from math import comb
    return comb(p_steps, j) * q ** j * (1.0 - q) ** (p_steps - j)


# ---------------------------------------------------------------------------
# Cross-model tables (drift m, CLT variance C, and the second derivative of
# lambda_u at 0, which equals C + m^2 since lambda_0 = 1 and lambda'_0 = m).
# ---------------------------------------------------------------------------

MEANS = {
    "std_example": 0.0,
    "periodic_example": 0.25,
    "breakdown_example": 0.0,
    "antidiag_example": 0.0,
    "classical_dilation": 0.0,
}

VARIANCES = {
    "std_example": 8.0 / 9.0,
    "periodic_example": 7.0 / 8.0,
    "breakdown_example": 1.0,
    "antidiag_example": 0.9216,
    "classical_dilation": 1.0,
}

LAMBDA_PP0 = {name: VARIANCES[name] + MEANS[name] ** 2 for name in MEANS}
