"""High-precision reference values for the unit and acceptance tests.

Run with mpmath; the printed values are frozen into tests/oracle_values.hpp.
"""
import mpmath as mp

mp.mp.dps = 60


def phi_upper(z):
    return mp.erfc(z / mp.sqrt(2)) / 2


def inv_robust(t):
    t = mp.mpf(t)
    # bisection in high precision, independent of erfinv
    lo, hi = mp.mpf(-40), mp.mpf(40)
    for _ in range(400):
        mid = (lo + hi) / 2
        if phi_upper(mid) > t:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def fmt(x):
    return mp.nstr(x, 20)


print("// phi_upper table (z, P(Z >= z))")
for z in [-37, -8, -5, -3, -2, -1, -0.5, 0, 0.25, 0.5, 1, 1.6448536269514722, 2, 3, 5, 8, 10, 15, 20, 27, 30, 35, 37.5]:
    print("{%s, %s}," % (repr(float(z)), fmt(phi_upper(mp.mpf(z)))))

print("// phi_upper_inv table (t, z)")
ts = ['1e-300', '1e-250', '1e-200', '1e-150', '1e-100', '1e-50', '1e-20', '1e-10', '1e-5', '0.001', '0.01',
      '0.05', '0.1', '0.158655253931457', '0.25', '0.5', '0.75', '0.9', '0.99', '0.999999', '0.9999999999',
      '0.99999999999999', '0.9999999999999999']
for s in ts:
    t = mp.mpf(float(s))  # the double nearest to the literal
    print("{%s, %s}," % (repr(float(s)), fmt(inv_robust(t))))

print("// density")
for z in [0, 1, 2.5]:
    print(z, fmt(mp.npdf(z)))


def G1(t, mu):
    return phi_upper(inv_robust(t) - mu)


def G(t, pi0, mu):
    return pi0 * t + (1 - pi0) * G1(t, mu)


print("G(0.5; 0.5, 2) =", fmt(G(mp.mpf('0.5'), mp.mpf('0.5'), 2)))


def tstar(pi0, mu, alpha):
    lo, hi = mp.mpf('1e-12'), mp.mpf(1) - mp.mpf('1e-12')
    for _ in range(200):
        mid = (lo + hi) / 2
        if G(mid, pi0, mu) - mid / alpha > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


mp.mp.dps = 40
ts1 = tstar(mp.mpf('0.5'), mp.mpf(2), mp.mpf('0.2'))
print("t* (0.5,2,0.2) =", fmt(ts1))
mut = 2 / mp.sqrt(mp.mpf('0.7'))
ts2 = tstar(mp.mpf('0.5'), mut, mp.mpf('0.2'))
print("t*_rho (0.5,2,0.2,rho=0.3) =", fmt(ts2))
for rho in ['0.1', '0.5', '0.7']:
    print("t*_rho rho=", rho, fmt(tstar(mp.mpf('0.5'), 2 / mp.sqrt(1 - mp.mpf(rho)), mp.mpf('0.2'))))
t99 = tstar(mp.mpf('0.5'), mp.mpf(2), mp.mpf('0.99'))
print("t* alpha=0.99 =", fmt(t99))
g02 = G1(mp.mpf('0.2'), 2)
g06 = G1(mp.mpf('0.6'), 2)
print("Z1Z1(0.2,0.6) =", fmt(2 * (g02 - g02 * g06)))
