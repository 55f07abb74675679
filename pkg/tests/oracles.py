"""High-precision reference implementations, written independently of sgblend.

Only forward values are defined here; derivatives come from mpmath's own
numerical differentiation at 50 digits, so no analytic formula is shared
with the code under test.
"""

import mpmath as mp

mp.mp.dps = 50


def sig(u):
    return 1 / (1 + mp.exp(-mp.mpf(u)))


def swish(x, beta=1):
    x = mp.mpf(x)
    return x * sig(mp.mpf(beta) * x)


def sswish(x, beta=1, gamma=0):
    return swish(x, beta) - mp.mpf(gamma)


def gelu_exact(x):
    x = mp.mpf(x)
    return x * mp.ncdf(x)


def gelu_tanh(x):
    # 1 + tanh(z) cancels ~0.87|z| digits in the left tail; carry enough to cover it
    with mp.workdps(300):
        x = mp.mpf(x)
        y = x / 2 * (1 + mp.tanh(mp.sqrt(2 / mp.pi) * (x + mp.mpf("0.044715") * x**3)))
    return +y


def mish(x):
    x = mp.mpf(x)
    return x * mp.tanh(mp.log1p(mp.exp(x)))


def relu(x):
    return max(mp.mpf(x), mp.mpf(0))


def sgblend(x, alpha=0.5, beta=1, gamma=0, gelu=gelu_tanh):
    a = mp.mpf(alpha)
    return a * sswish(x, beta, gamma) + (1 - a) * gelu(x)


def forward(kind, x, alpha=0.5, beta=1.0, gamma=0.0):
    return {
        "relu": lambda: relu(x),
        "swish": lambda: swish(x, beta),
        "gelu_exact": lambda: gelu_exact(x),
        "gelu_tanh": lambda: gelu_tanh(x),
        "mish": lambda: mish(x),
        "sswish": lambda: sswish(x, beta, gamma),
        "sgblend": lambda: sgblend(x, alpha, beta, gamma),
    }[kind]()


def derivative(kind, variable, x, alpha=0.5, beta=1.0, gamma=0.0):
    """d forward / d variable at the given point, by 50-digit numerical differentiation."""
    args = {"x": x, "alpha": alpha, "beta": beta, "gamma": gamma}
    var = "x" if variable == "input" else variable

    def f(v):
        a = dict(args)
        a[var] = v
        return forward(kind, a["x"], a["alpha"], a["beta"], a["gamma"])

    return mp.diff(f, mp.mpf(args[var]))
