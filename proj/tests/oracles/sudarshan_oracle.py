"""Reference values for the six-variable hybrid oscillator.

Builds the flow directly from the hand-written equations of motion (not from a
structure matrix times a Hamiltonian) and exponentiates with scipy.
Ordering: (q, p, q_p, p_q, x, k).
"""
import numpy as np
from scipy.linalg import expm

HBAR = 1.0


def cq_flow(Om, om, g, a, b):
    A = np.zeros((6, 6))
    q, p, qp, pq, x, k = range(6)
    A[q, p] = 1
    A[p, q] = -Om**2; A[p, x] = -b
    A[qp, pq] = 1
    A[pq, qp] = -Om**2; A[pq, x] = -a
    A[x, k] = 1
    A[k, x] = -om**2; A[k, q] = -a; A[k, qp] = -b
    return A


def qq_flow(Om, om, g):
    return np.array([[0, 1, 0, 0], [-Om**2, 0, -g, 0], [0, 0, 0, 1], [-g, 0, -om**2, 0]], float)


# bar coordinates eta = T xi, eta = (qbar, pbar, l_p, l_q, x, k)
T = np.array([[0.5, 0, 1, 0, 0, 0],
              [0, 0.5, 0, 1, 0, 0],
              [-0.5, 0, 1, 0, 0, 0],
              [0, -0.5, 0, 1, 0, 0],
              [0, 0, 0, 0, 1, 0],
              [0, 0, 0, 0, 0, 1]], float)

if __name__ == "__main__":
    Om, om, g = 3.0, 2.0, 1.0
    A = cq_flow(Om, om, g, g / 2, g)
    Aq = qq_flow(Om, om, g)
    # QQ initial covariance: classical delta x coherent quantum oscillator
    S_qq0 = np.diag([0, 0, HBAR / (2 * om), HBAR * om / 2])
    # CQ initial covariance in bar coordinates: obs block = S_qq0 on (qbar,pbar,x,k), l block = hbar/2 I
    S_eta = np.zeros((6, 6))
    idx = [0, 1, 4, 5]
    S_eta[np.ix_(idx, idx)] = S_qq0
    S_eta[2, 2] = S_eta[3, 3] = HBAR / 2
    Tinv = np.linalg.inv(T)
    S_xi = Tinv @ S_eta @ Tinv.T
    obs = [0, 1, 4, 5]
    best = 0
    for i in range(0, 1001):
        t = i * 0.01
        U = expm(A * t)
        S = U @ S_xi @ U.T
        V = expm(Aq * t)
        Sq = V @ S_qq0 @ V.T
        dev = np.abs(S[np.ix_(obs, obs)] - Sq).max()
        best = max(best, dev)
    print("max covariance deviation t<=10 dt=0.01: %.12g  (hbar*Om^2/2 = %.12g)" % (best, HBAR * Om**2 / 2))
    # first-moment flow equality sanity
    rng = np.random.default_rng(1)
    m = rng.uniform(-1, 1, 4)
    m6 = np.array([m[0], m[1], m[0] / 2, m[1] / 2, m[2], m[3]])
    e = np.abs((expm(A * 10) @ m6)[obs] - expm(Aq * 10) @ m).max()
    print("first-moment mismatch at t=10:", e)
