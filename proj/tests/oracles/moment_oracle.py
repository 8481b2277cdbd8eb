"""Independent check of the mixture skewness/kurtosis closed forms.

Conditions on (lambda, delta, V): given those, Y is normal with mean
a*gamma*delta*(V - sqrt(2/pi)) and variance a^2 sigma^2 + tau^2, a = lambda^{-1/2}.
The conditional central moments are integrated numerically: Gauss-Hermite for
ln(lambda) and delta, dense Gauss-Legendre on [0, 10] for the half-normal V.
"""
import numpy as np

C = np.sqrt(2 / np.pi)
XH, WH = np.polynomial.hermite_e.hermegauss(80)
WH = WH / np.sqrt(2 * np.pi)
XG, WG = np.polynomial.legendre.leggauss(400)
V = 5 * (XG + 1)
WV = 5 * WG * 2 * np.exp(-V * V / 2) / np.sqrt(2 * np.pi)


def skew_kurt(g, nu, tau, sig):
    m1 = m2 = m3 = m4 = 0.0
    for zl, wz in zip(XH, WH):
        a = np.exp(-(-nu / 2 + np.sqrt(nu) * zl) / 2)
        for zd, wd in zip(XH, WH):
            m = a * g * (1 + zd) * (V - C)
            s2 = a * a * sig * sig + tau * tau
            w = wz * wd * WV
            m1 += np.sum(w * m)
            m2 += np.sum(w * (m * m + s2))
            m3 += np.sum(w * (m ** 3 + 3 * m * s2))
            m4 += np.sum(w * (m ** 4 + 6 * m * m * s2 + 3 * s2 * s2))
    assert abs(m1) < 1e-10
    return m3 / m2 ** 1.5, m4 / m2 ** 2


if __name__ == "__main__":
    for args in [(1, 0.5, 1, 1), (-2, 1, 0.5, 2), (100, 0, 1, 1), (0.5, 0.25, 1, 1), (2, 1, 1, 1)]:
        s, k = skew_kurt(*args)
        print(args, "S=%.15g K=%.15g" % (s, k))
