"""Reference computations that do not use the package under test.

Everything here is written directly in numpy from the defining formulas so
the package can be checked against an independent route.
"""

import numpy as np


def rot(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s], [s, c]])


def sq(s):
    return np.diag([s, 1.0 / s])


def bs(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.block([[c * np.eye(2), -s * np.eye(2)], [s * np.eye(2), c * np.eye(2)]])


def dsum(*blocks):
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n))
    k = 0
    for b in blocks:
        m = b.shape[0]
        out[k : k + m, k : k + m] = b
        k += m
    return out


def sym_form(n):
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def gaussian_density(x, mean, cov):
    d = x - mean
    n = len(x) // 2
    return np.exp(-0.5 * d @ np.linalg.inv(cov) @ d) / ((2 * np.pi) ** n * np.sqrt(np.linalg.det(cov)))


def grid_integral_1mode(mean, cov, half_width=8.0, points=401):
    """Trapezoid integral of a single-mode Gaussian density over a square grid."""
    xs = np.linspace(mean[0] - half_width, mean[0] + half_width, points)
    ys = np.linspace(mean[1] - half_width, mean[1] + half_width, points)
    inv = np.linalg.inv(cov)
    X, Y = np.meshgrid(xs - mean[0], ys - mean[1], indexing="ij")
    quad = inv[0, 0] * X**2 + 2 * inv[0, 1] * X * Y + inv[1, 1] * Y**2
    w = np.exp(-0.5 * quad) / (2 * np.pi * np.sqrt(np.linalg.det(cov)))
    return np.trapezoid(np.trapezoid(w, ys, axis=1), xs)


def cluster_cov_from_wigner(eps):
    """Cluster covariance read off the product-of-Gaussians Wigner exponent.

    W ~ exp(-[eps q_c^2 + (p_c - t q_c')^2 / eps + eps q_c'^2 + (p_c' - t q_c)^2 / eps])
    in the ordering (q_c, p_c, q_c', p_c').
    """
    t = np.sqrt(1 - eps**2)
    # rows give linear forms whose squares appear with weights w
    forms = np.array(
        [
            [1, 0, 0, 0],  # q_c
            [0, 1, -t, 0],  # p_c - t q_c'
            [0, 0, 1, 0],  # q_c'
            [-t, 0, 0, 1],  # p_c' - t q_c
        ],
        dtype=float,
    )
    w = np.array([eps, 1 / eps, eps, 1 / eps])
    precision = 2 * forms.T @ np.diag(w) @ forms
    return np.linalg.inv(precision)


def tmsv(r):
    ch, sh = np.cosh(2 * r), np.sinh(2 * r)
    z = np.diag([1.0, -1.0])
    return 0.5 * np.block([[ch * np.eye(2), sh * z], [sh * z, ch * np.eye(2)]])


def tmsv_q_conditioning(r, m):
    """Posterior (mean q2, var q2) after measuring q1 = m on a TMSV."""
    return m * np.tanh(2 * r), 1.0 / (2 * np.cosh(2 * r))


def noise_matrices(eps, arity):
    t2 = 1 - eps**2
    s1 = np.eye(2 * arity) / eps
    s2 = np.kron(np.eye(arity), np.diag([0.0, eps]))
    s3 = np.kron(np.eye(arity), np.diag([eps / t2, eps]))
    return s1, s2, s3


def d_vector(sigma_t, eps, mq_mp):
    """-A^{-1} B gamma assembled from the noise matrices (single-mode)."""
    t = np.sqrt(1 - eps**2)
    s1, s2, s3 = noise_matrices(eps, 1)
    lam = np.linalg.inv(sigma_t)
    k = np.linalg.inv(lam + 2 * s1)
    a = (lam + 2 * s3) - (lam + 2 * s2) @ k @ (lam + 2 * s2)
    b = 2 * s3 - (lam + 2 * s2) @ k @ (2 * s2)
    gamma = np.diag([t, 1 / t]) @ np.asarray(mq_mp, dtype=float)
    return -np.linalg.solve(a, b @ gamma)


def feedforward(m1, m3, th1, th3, t):
    sm = np.sin(th1 - th3)
    return np.array(
        [
            np.sqrt(2) * (m1 * np.sin(th3) + m3 * np.sin(th1)) / (t * sm),
            -np.sqrt(2) * t * (m1 * np.cos(th3) + m3 * np.cos(th1)) / sm,
        ]
    )


def example1_forms(s, eps):
    t2 = 1 - eps**2
    num = eps * s**2 * t2 - eps * (1 + eps * s)
    return dict(
        sigma_t=0.5 * np.diag([1 / s, s]),
        deviation=np.diag([-num / (s * t2 * (1 + eps * s)), num / (eps + s)]),
        sigma=0.5 * np.diag([(1 + eps * s) / (eps + s), (eps + s) / (1 + eps * s)]),
        u_ec=np.diag([np.sqrt((1 + eps / s) / (1 + eps * s)), np.sqrt((1 + eps * s) / (1 + eps / s))]),
    )


def example2_jk(r, eps):
    den = 1 + eps**2 + 2 * eps * np.cosh(2 * r)
    j = (1 + 2 * eps * np.cosh(2 * r) + eps**2 * np.cosh(4 * r)) / den
    k = 2 * eps * np.sinh(2 * r) * (1 + eps * np.cosh(2 * r)) / den
    return j, k


def example2_one_plus_deviation(r, eps):
    t2 = 1 - eps**2
    j, k = example2_jk(r, eps)
    m = np.zeros((4, 4))
    m[0, 0] = m[2, 2] = j / t2
    m[1, 1] = m[3, 3] = t2 * j
    m[0, 2] = m[2, 0] = k / t2
    m[1, 3] = m[3, 1] = -t2 * k
    return m


def two_mode_squeezer(alpha):
    ch, sh = np.cosh(alpha), np.sinh(alpha)
    z = np.diag([1.0, -1.0])
    return np.block([[ch * np.eye(2), sh * z], [sh * z, ch * np.eye(2)]])


def brute_force_gadget_cov(sigma_in, th1, th3, eps):
    """Single-mode gadget output covariance by explicit Schur complements.

    Builds the 3-mode covariance (input, c, c'), applies the balanced beam
    splitter to (input, c), then conditions on b_theta1 of the input port and
    b_theta3 of the cluster port in one joint step.
    """
    t = np.sqrt(1 - eps**2)
    sqz = np.diag([1 / (2 * eps), eps / 2])
    cz = np.eye(4)
    cz[1, 2] = cz[3, 0] = t
    cl = cz @ dsum(sqz, sqz) @ cz.T
    full = dsum(sigma_in, cl)
    b = dsum(bs(np.pi / 4), np.eye(2))
    full = b @ full @ b.T
    u = np.zeros((2, 6))
    u[0, 0], u[0, 1] = np.sin(th1), np.cos(th1)
    u[1, 2], u[1, 3] = np.sin(th3), np.cos(th3)
    keep = np.zeros((2, 6))
    keep[0, 4] = keep[1, 5] = 1.0
    s_mm = u @ full @ u.T
    s_km = keep @ full @ u.T
    return keep @ full @ keep.T - s_km @ np.linalg.solve(s_mm, s_km.T)
