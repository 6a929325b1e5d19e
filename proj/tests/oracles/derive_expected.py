#!/usr/bin/env python3
"""Independent high-precision reference values for the C++ unit tests.

Everything here is computed with mpmath from closed forms or direct
quadrature, without touching the C++ code paths.  Run it to reproduce the
constants frozen in tests/*.cpp:

    python3 tests/oracles/derive_expected.py
"""
import mpmath as mp

mp.mp.dps = 40


def header(title):
    print()
    print("==", title)


# ---------------------------------------------------------------- nonlinearity
header("reference potential, species (+1,2),(-1,1)")
phi_star = mp.findroot(lambda p: 2 * mp.e**(-p) - mp.e**p, 0.3)
print("phi* =", mp.nstr(phi_star, 20), " ln2/2 =", mp.nstr(mp.log(2) / 2, 20))

header("decay rate of f = -2 sinh")
print("m_f[-1,1] =", mp.nstr(mp.sqrt(2), 20))
print("m_f[1,2]  =", mp.nstr(mp.sqrt(2 * mp.cosh(1)), 20))


# ------------------------------------------------------------------- profiles
def gouy_chapman(u0, t):
    """u'' = 2 sinh u, u(0) = u0, u -> 0."""
    return 4 * mp.atanh(mp.tanh(u0 / 4) * mp.e**(-mp.sqrt(2) * t))


def gouy_chapman_d(u0, t):
    return mp.diff(lambda s: gouy_chapman(u0, s), t)


def F_sinh(p):
    # F(p) = int_0^p -2 sinh s ds
    return -2 * (mp.cosh(p) - 1)


header("Gouy-Chapman, gamma = 0, phi_bd = 1")
print("u'(0) =", mp.nstr(-mp.sqrt(4 * (mp.cosh(1) - 1)), 20),
      " -2 sqrt2 sinh(1/2) =", mp.nstr(-2 * mp.sqrt(2) * mp.sinh(0.5), 20))
print("u(1)  =", mp.nstr(gouy_chapman(1, 1), 20))
print("-F(u(0)) =", mp.nstr(-F_sinh(1), 20))
print("field u'(0)/sqrt(1e-4) =", mp.nstr(-mp.sqrt(4 * (mp.cosh(1) - 1)) / mp.mpf('0.01'), 20))


def robin_u0(phi_bd, gamma):
    sgn = mp.sign(phi_bd)
    g = lambda s: phi_bd - s - sgn * gamma * mp.sqrt(-2 * F_sinh(s))
    return mp.findroot(g, (mp.mpf(0) + 1e-30 * sgn, phi_bd), solver='bisect' if False else 'anderson')


header("Robin U0, f = -2 sinh")
for gamma in (mp.mpf('0.1'), mp.mpf(1)):
    for pb in (1, -1, mp.mpf('0.5')):
        u0 = robin_u0(mp.mpf(pb), gamma)
        print(f"gamma={gamma} phi_bd={pb}: U0 =", mp.nstr(u0, 20),
              " U'(0) =", mp.nstr(-mp.sign(pb) * mp.sqrt(-2 * F_sinh(u0)), 20))


def v_profile(u0, gamma, t):
    """V from the integral representation, with U the shifted Gouy-Chapman profile."""
    up = lambda s: gouy_chapman_d(u0, s)
    tail = lambda s1: mp.quad(lambda s2: up(s2)**2, [s1, mp.inf])
    total = tail(0)
    f_u0 = -2 * mp.sinh(u0)
    up0 = up(0)
    V0 = -gamma / (up0 + gamma * f_u0) * total
    inner = mp.quad(lambda s1: tail(s1) / up(s1)**2, [0, t])
    return V0 / up0 * up(t) - up(t) * inner, V0, total


header("v profile, f = -2 sinh")
mp.mp.dps = 20
v1, V0, total = v_profile(mp.mpf(1), mp.mpf(0), mp.mpf(1))
print("gamma=0, phi_bd=1: v(1) =", mp.nstr(v1, 15), " int u'^2 =", mp.nstr(total, 15))
print("   potential(t=1, eps=1e-4, H=1, d=2) =", mp.nstr(gouy_chapman(1, 1) + mp.mpf('0.01') * v1, 15))
u0 = robin_u0(mp.mpf(1), mp.mpf('0.1'))
v2, V0, total = v_profile(u0, mp.mpf('0.1'), mp.mpf(2))
print("gamma=0.1, phi_bd=1: V0 =", mp.nstr(V0, 15), " v(2) =", mp.nstr(v2, 15),
      " int u'^2 =", mp.nstr(total, 15))
mp.mp.dps = 40


# ----------------------------------------------------------------------- ccpb
def ccpb_constants(areas, curv_integrals, gammas, phibds, volume, dim, masses, valences):
    masses = [mp.mpf(m) for m in masses]

    def F0(p, s):
        return sum(m * (1 - mp.e**(-z * (p - s))) for m, z in zip(masses, valences)) / volume

    def f0(p, s):
        return sum(m * z * mp.e**(-z * (p - s)) for m, z in zip(masses, valences)) / volume

    def u0_of(s, gamma, pb):
        if gamma == 0:
            return mp.mpf(pb)
        sgn = mp.sign(pb - s)
        g = lambda x: pb - x - sgn * gamma * mp.sqrt(max(-2 * F0(x, s), 0))
        return mp.findroot(g, (s, mp.mpf(pb)), solver='illinois', tol=1e-35)

    def uprime0(s, gamma, pb):
        u0 = u0_of(s, gamma, pb)
        return mp.sign(s - pb) * mp.sqrt(-2 * F0(u0, s))

    def residual(s):
        return sum(a * uprime0(s, g, pb) for a, g, pb in zip(areas, gammas, phibds))

    lo, hi = min(phibds), max(phibds)
    # dense scan for the unique sign change
    n = 64
    pts = [lo + (hi - lo) * (j + 0.5) / n for j in range(n)]
    vals = [residual(p) for p in pts]
    bracket = None
    for j in range(n - 1):
        if vals[j] * vals[j + 1] <= 0:
            bracket = (pts[j], pts[j + 1])
    s = mp.findroot(residual, bracket, solver='illinois', tol=1e-35)
    u0s = [u0_of(s, g, pb) for g, pb in zip(gammas, phibds)]
    up0s = [mp.sign(s - pb) * mp.sqrt(-2 * F0(u0, s)) for u0, pb in zip(u0s, phibds)]

    # int_0^inf u'^2 dt = sgn(s - pb) int_{u0}^{s} sqrt(-2F0)
    energy = [mp.sign(s - pb) * mp.quad(lambda x: mp.sqrt(max(-2 * F0(x, s), 0)), [u0, s])
              for u0, pb in zip(u0s, phibds)]

    # mhat through potential space: ds = du / u'(u)
    def time_integral(g, u0, pb):
        sgn = mp.sign(s - pb)
        def integrand(x):
            den = mp.sqrt(max(-2 * F0(x, s), 0))
            if den == 0:
                return 0
            return g(x) / (sgn * den)
        return mp.quad(integrand, [u0, s])

    mhat = []
    for m, z in zip(masses, valences):
        acc = 0
        for a, u0, pb in zip(areas, u0s, phibds):
            acc += a * time_integral(lambda x: 1 - mp.e**(-z * (x - s)), u0, pb)
        mhat.append(m / volume * acc)
    Fhat1 = lambda p: sum(mh * (1 - mp.e**(-z * (p - s))) for mh, z in zip(mhat, valences)) / volume
    num = 0
    den = 0
    for a, H, g, u0, up0, en in zip(areas, curv_integrals, gammas, u0s, up0s, energy):
        D = up0 + g * f0(u0, s)
        num += (a * Fhat1(u0) + (dim - 1) * H * en) / D
        den += a * f0(u0, s) / D
    Q = num / den
    return dict(phi0=s, u0=u0s, up0=up0s, energy=energy, mhat=mhat, Q=Q,
                sum_mhat_z=sum(mh * z for mh, z in zip(mhat, valences)))


header("CCPB, annulus a=1 R=2 d=2, symmetric salt, gamma=(0.1,0.1), phi_bd=(+1,-1)")
pi = mp.pi
res = ccpb_constants(areas=[4 * pi, 2 * pi], curv_integrals=[2 * pi, -2 * pi],
                     gammas=[mp.mpf('0.1'), mp.mpf('0.1')], phibds=[1, -1],
                     volume=3 * pi, dim=2, masses=[1, 1], valences=[1, -1])
for k, v in res.items():
    if isinstance(v, list):
        print(k, [mp.nstr(x, 17) for x in v])
    else:
        print(k, mp.nstr(v, 17))

header("CCPB, equal areas (2pi, 2pi), zero curvature, symmetric salt")
res = ccpb_constants(areas=[2 * pi, 2 * pi], curv_integrals=[0, 0],
                     gammas=[mp.mpf('0.1'), mp.mpf('0.1')], phibds=[1, -1],
                     volume=3 * pi, dim=2, masses=[1, 1], valences=[1, -1])
for k, v in res.items():
    if isinstance(v, list):
        print(k, [mp.nstr(x, 17) for x in v])
    else:
        print(k, mp.nstr(v, 17))

header("CCPB, annulus, gamma = 0 (Dirichlet limit)")
res = ccpb_constants(areas=[4 * pi, 2 * pi], curv_integrals=[2 * pi, -2 * pi],
                     gammas=[0, 0], phibds=[1, -1],
                     volume=3 * pi, dim=2, masses=[1, 1], valences=[1, -1])
print("phi0 =", mp.nstr(res['phi0'], 17), " Q =", mp.nstr(res['Q'], 17))
