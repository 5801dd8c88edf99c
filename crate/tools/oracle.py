"""Arbitrary-precision reference values frozen into the Rust test suites.

Run with `python3 tools/oracle.py`; every printed number is copied verbatim
into the test that checks it.
"""
import mpmath as mp

mp.mp.dps = 50


def zeta(x, y):
    return mp.zeta(mp.mpc(x, y))


def chi(z):
    return mp.power(2, z) * mp.power(mp.pi, z - 1) * mp.sin(mp.pi * z / 2) * mp.gamma(1 - z)


def partial(z, n):
    pref = 1 / (1 - mp.power(2, 1 - z))
    return pref * mp.fsum((-1) ** (k + 1) * mp.power(k, -z) for k in range(1, n + 1))


def show(label, v):
    if isinstance(v, mp.mpc):
        print(f"{label}: re={mp.nstr(v.real, 17)} im={mp.nstr(v.imag, 17)} abs={mp.nstr(abs(v), 17)}")
    else:
        print(f"{label}: {mp.nstr(v, 17)}")


lg = mp.loggamma(mp.mpc(0.5, 100))
show("log_gamma(0.5+100i) log_mag", lg.real)
show("log_gamma(0.5+100i) phase mod 2pi", mp.atan2(mp.sin(lg.imag), mp.cos(lg.imag)))

c = chi(mp.mpc(0.05, 1000))
show("chi(0.05+1000i) log_mag", mp.log(abs(c)))
show("chi(0.05+1000i) phase", mp.arg(c))

p = mp.power(2, -mp.mpc(0.5, 14.1347))
show("2^-(0.5+14.1347i) log_mag", mp.log(abs(p)))
show("2^-(0.5+14.1347i) phase", mp.arg(p))

# k^-z at a height where the double-precision phase would be useless
p = mp.power(99991, -mp.mpc(0.25, 1e11))
show("99991^-(0.25+1e11 i) phase", mp.arg(p))

show("zeta(0.5+1000.5i)", zeta(0.5, 1000.5))
show("zeta(0.3+2.5e6 i)", zeta(0.3, 2.5e6))
show("zeta(0.95+1e8 i)", zeta(0.95, 1e8))
show("S_500(0.5+100i)", partial(mp.mpc(0.5, 100), 500))

z = mp.mpc(0.5, 50)
pref = 1 / (1 - mp.power(2, 1 - z))
head = pref * mp.fsum((-1) ** (k + 1) * mp.power(k, -z) for k in range(1, 11))
zeta_08 = mp.zeta(z) - head
show("core_a(0.5+50i, 0.5)", abs(zeta_08 + 0.5 * head))
show("core(0.5+50i)", abs(zeta_08))


def eta(y, t):
    x = 0.5 * (1 - mp.exp(-t))
    return mp.exp(t) * (abs(zeta(x, y)) - abs(zeta(0.5, y)))


def eta_tilde(y, t):
    x = 0.5 * (1 - mp.exp(-t))
    return mp.exp(t) * (abs(zeta(x, y)) / abs(zeta(0.5, y)) - 1)


def core_a(x, y, a):
    z = mp.mpc(x, y)
    m = int(mp.floor(0.2 * y))
    pref = 1 / (1 - mp.power(2, 1 - z))
    head = pref * mp.fsum((-1) ** (k + 1) * mp.power(k, -z) for k in range(1, m + 1))
    return abs(mp.zeta(z) - head + a * head)


show("eta(20,0)", eta(20, 0))
show("eta_tilde(50,5)", eta_tilde(50, 5))
xt = 0.5 * (1 - mp.exp(-2))
show("x_lower(100,2)", mp.exp(2) * (abs(chi(mp.mpc(xt, 100))) - 1))
x5 = 0.5 * (1 - mp.exp(-5))
show("eta_tilde_a(50,5,0.5)", mp.exp(5) * (core_a(x5, 50, 0.5) / core_a(0.5, 50, 0.5) - 1))
show("theta(1000)", abs(zeta(0.5, 1000)))
show("first zero", mp.zetazero(1).imag)
