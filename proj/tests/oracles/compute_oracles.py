"""Independent reference values frozen into the C++ tests.

Routes used here deliberately differ from the library: Owen's T for the
univariate skew-normal cdf, conditioning on the Gaussian component (not the
half-normal one) for joint survivals, and mpmath for special values.
"""
from math import pi, sqrt, log, exp
import mpmath as mp
import numpy as np
from scipy import integrate, stats
from scipy.special import owens_t

mp.mp.dps = 40


def bvn_lower(x, y, rho):
    # P(X <= x, Y <= y) by conditioning on X; independent of the Genz angle formula
    r = sqrt(1 - rho * rho)
    f = lambda t: stats.norm.pdf(t) * stats.norm.cdf((y - rho * t) / r)
    v, _ = integrate.quad(f, -40, x, epsabs=0, epsrel=1e-13, limit=400)
    return v


def sn_params(mu, s2, d):
    # GSN_1(mu, s2, d) is the Azzalini skew normal with omega^2 = s2 + d^2, alpha = d / sqrt(s2)
    return mu, sqrt(s2 + d * d), d / sqrt(s2)


def sn_cdf(x, mu, s2, d):
    loc, om, al = sn_params(mu, s2, d)
    z = (x - loc) / om
    return stats.norm.cdf(z) - 2.0 * owens_t(z, al)


def sn_sf(x, mu, s2, d):
    loc, om, al = sn_params(mu, s2, d)
    z = (x - loc) / om
    return max(stats.norm.sf(z) + 2.0 * owens_t(z, al), 1e-300)


def sn_isf(q, mu, s2, d):
    loc, om, al = sn_params(mu, s2, d)
    from scipy.optimize import brentq
    return brentq(lambda x: log(sn_sf(x, mu, s2, d)) - log(q), loc - 8 * om, loc + 8 * om, xtol=1e-14)


def sym_sqrt(rho):
    a = (sqrt(1 + rho) + sqrt(1 - rho)) / 2
    b = (sqrt(1 + rho) - sqrt(1 - rho)) / 2
    return np.array([[a, b], [b, a]])


def pair(rho, d1, d2):
    s = sym_sqrt(rho) @ np.array([d1, d2])
    return -sqrt(2 / pi) * s, s


def half_normal_exceed(c, s):
    # P(s V > c), V ~ HN(0, 1)
    if s == 0:
        return 1.0 if c < 0 else 0.0
    if s > 0:
        return 1.0 if c <= 0 else 2 * stats.norm.sf(c / s)
    return 0.0 if c >= 0 else 1 - 2 * stats.norm.sf(c / s)


def joint_survival_by_w(rho, d1, d2, u):
    mu, s = pair(rho, d1, d2)
    q = [sn_isf(1 - u, mu[i], 1.0, s[i]) for i in range(2)]
    r = sqrt(1 - rho * rho)

    def inner(w1):
        g1 = half_normal_exceed(q[0] - mu[0] - w1, s[0])
        if g1 == 0:
            return 0.0
        f = lambda w2: stats.norm.pdf(w2, rho * w1, r) * half_normal_exceed(q[1] - mu[1] - w2, s[1])
        v, _ = integrate.quad(f, -12, 12, epsabs=0, epsrel=1e-12, limit=400)
        return stats.norm.pdf(w1) * g1 * v

    val, _ = integrate.quad(inner, -12, 12, epsabs=0, epsrel=1e-11, limit=400)
    return q, val


print("normal_cdf(1.96) =", mp.ncdf(1.96))
print("normal_quantile(0.975) =", mp.sqrt(2) * mp.erfinv(2 * mp.mpf('0.975') - 1))
print("matern32(1) = 2/e =", 2 / mp.e)
print("gsn1 pdf delta=1 z=0 =", 1 / mp.sqrt(4 * mp.pi))
print("gsn1 mean delta=2 =", 2 * mp.sqrt(2 / mp.pi), " var =", 1 + 4 * (1 - 2 / mp.pi))
print("gsn1 cdf(0) delta=1 =", sn_cdf(0.0, 0, 1, 1))
print("gsn1 cdf(1.3) mu=0.5 s2=2 delta=-1.5 =", sn_cdf(1.3, 0.5, 2.0, -1.5))
print("gsn1 sf(4.0) mu=0 s2=1 delta=2 =", sn_sf(4.0, 0.0, 1.0, 2.0))
print("prop1 threshold rho=.8 d2=0 =", mp.sqrt(mp.mpf(1.8) / mp.mpf(1.6) - 1))
print("var sgrf tau=sigma=gamma=1 =", 2 + 2 * (1 - 2 / mp.pi))

# gsn2 pdf at a point, rho=0.4 delta=(1,-1), z=(0.3,-0.2), mu=0
Sig = np.array([[1, 0.4], [0.4, 1]]); D = np.diag([1.0, -1.0]); z = np.array([0.3, -0.2])
Om = Sig + D @ D
Delta = np.eye(2) - D @ np.linalg.inv(Om) @ D
a = D @ np.linalg.inv(Om) @ z
pdf2 = 4 * stats.multivariate_normal(mean=[0, 0], cov=Om).pdf(z) * bvn_lower(a[0] / sqrt(Delta[0, 0]), a[1] / sqrt(Delta[1, 1]), Delta[0, 1] / sqrt(Delta[0, 0] * Delta[1, 1]))
print("gsn2 pdf rho=.4 d=(1,-1) z=(.3,-.2) =", repr(pdf2))

print("bvn_cdf(0.5,-1.2,0.3) =", repr(bvn_lower(0.5, -1.2, 0.3)))
print("bvn_cdf(-1,-1.5,0.95) =", repr(bvn_lower(-1, -1.5, 0.95)))
print("bvn_cdf(-6,-5,0.8) =", repr(bvn_lower(-6, -5, 0.8)))
print("bvn_cdf(1,2,-0.7) =", repr(bvn_lower(1, 2, -0.7)))
for (rho, d1, d2, u) in [(0.4, 2, 1, 0.95), (0.8, 1, 0.5, 0.99), (0.4, -1, 1, 0.999)]:
    q, S = joint_survival_by_w(rho, d1, d2, u)
    print(f"joint survival rho={rho} d=({d1},{d2}) u={u}: q={q!r} S={S!r} chibar={2*log(1-u)/log(S)-1!r}")

for (rho, u) in [(0.4, 0.9), (0.4, 0.99), (0.4, 0.999), (0.8, 0.9), (0.8, 0.99), (0.8, 0.999)]:
    q = stats.norm.isf(1 - u)
    S = bvn_lower(-q, -q, rho)
    print(f"normal pair rho={rho} u={u}: S={S!r} chibar={2*log(1-u)/log(S)-1!r}")

c = 1 - 2 / mp.pi
S_lim = 4 * (4 / mp.pi - 1) * mp.sqrt(2 / mp.pi) / (2 * c) ** 1.5
K_lim = 10 * (3 - 4 / mp.pi - 12 / mp.pi ** 2) / (4 * c * c)
print("S limit gamma->inf nu=0 =", S_lim, " K limit =", K_lim)
