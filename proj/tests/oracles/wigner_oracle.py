"""Independent reference values for the two-oscillator dispersion tests.

Uses scipy's Pade matrix exponential and a plain time grid; shares no code
with the C++ propagators. Values printed here are frozen into the C++ tests.
"""
import numpy as np
from scipy.linalg import expm

HBAR = 1.0


def flow(Om, om, g):
    return np.array([[0, 1, 0, 0],
                     [-Om**2, 0, -g, 0],
                     [0, 0, 0, 1],
                     [-g, 0, -om**2, 0]], dtype=float)


def initial_cov(om):
    sx2 = HBAR / (2 * om)
    sk2 = HBAR * om / 2
    return np.diag([0.0, 0.0, sx2, sk2])


def products(Om, om, g, t_max, dt):
    A = flow(Om, om, g)
    S0 = initial_cov(om)
    n = int(round(t_max / dt))
    out = []
    # step propagator repeatedly would accumulate error; exponentiate per time
    for i in range(n + 1):
        t = i * dt
        U = expm(A * t)
        S = U @ S0 @ U.T
        dqdp = np.sqrt(max(S[0, 0], 0) * max(S[1, 1], 0))
        dxdk = np.sqrt(max(S[2, 2], 0) * max(S[3, 3], 0))
        out.append((t, dqdp, dxdk))
    return np.array(out)


if __name__ == "__main__":
    configs = [(3, 2, 1), (2, 3, 1), (2, 0.51, 1), (0.51, 2, 1), (1.73, 1.73, 1), (1, 1.01, 1)]
    for c in configs:
        r = products(*c, 40.0, 0.01)
        tot = r[:, 1] + r[:, 2]
        print("config", c, "min total", tot.min(), "max dqdp", r[:, 1].max(), "min dxdk", r[:, 2].min())
    r = products(1, 1.01, 1, 200.0, 0.01)
    print("extreme (1,1.01,1) t<=200: min dxdk %.12g max dqdp %.12g" % (r[:, 2].min(), r[:, 1].max()))
    r = products(3, 2, 0.01, 40.0, 0.01)
    print("decoupled (3,2,0.01): max dqdp %.12g  min dxdk %.12g max dxdk %.12g" % (r[:, 1].max(), r[:, 2].min(), r[:, 2].max()))
    # commensurate normal modes: freqs^2 = 1 and 4 with gamma = 1
    Om2 = (5 + np.sqrt(5)) / 2
    om2 = (5 - np.sqrt(5)) / 2
    M = np.array([[Om2, 1], [1, om2]])
    print("commensurate eigenvalues", np.linalg.eigvalsh(M))
    A = flow(np.sqrt(Om2), np.sqrt(om2), 1.0)
    print("U(2pi)-I max", np.abs(expm(A * 2 * np.pi) - np.eye(4)).max())
