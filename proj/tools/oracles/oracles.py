"""Independent reference values frozen into the unit tests.

Run: python3 tools/oracles/oracles.py
"""
import numpy as np
from scipy import integrate, signal


def link_points(r, L=1.0):
    # Middle link centered at the origin along +x; head hinged at +L/2, tail at -L/2.
    r1, r2 = r
    head = (np.array([L / 2, 0.0]), np.array([np.cos(r1), np.sin(r1)]))
    mid = (np.array([-L / 2, 0.0]), np.array([1.0, 0.0]))
    tail = (np.array([-L / 2, 0.0]), -np.array([np.cos(-r2), np.sin(-r2)]))
    return head, mid, tail


def drag_force(tangent, v, ct=1.0, cn=2.0):
    n = np.array([-tangent[1], tangent[0]])
    return -(ct * tangent * (tangent @ v) + cn * n * (n @ v))


def total_wrench(r, r_dot, xi, L=1.0):
    vx, vy, w = xi
    links = link_points(r, L)
    # Angular rate of each link in the body frame.
    rates = [w + r_dot[0], w, w - r_dot[1]]
    hinge_vel = lambda p: np.array([vx - w * p[1], vy + w * p[0]])
    out = np.zeros(3)
    for (p0, d), om in zip(links, rates):
        tdir = d / np.linalg.norm(d)
        def f(s, comp):
            p = p0 + s * d
            v = hinge_vel(p0) + om * s * np.array([-d[1], d[0]])
            F = drag_force(tdir, v)
            return [F[0], F[1], p[0] * F[1] - p[1] * F[0]][comp]
        for c in range(3):
            out[c] += integrate.quad(f, 0.0, L, args=(c,), epsabs=1e-14, epsrel=1e-14)[0]
    return out


def connection(r):
    Oxi = np.column_stack([total_wrench(r, [0, 0], e) for e in np.eye(3)])
    Or = np.column_stack([total_wrench(r, e, [0, 0, 0]) for e in np.eye(2)])
    return np.linalg.solve(Oxi, Or)


def main():
    import warnings
    warnings.simplefilter("ignore", integrate.IntegrationWarning)

    np.set_printoptions(precision=17)
    print("// local_connection oracle (A with xi = -A r_dot)")
    for r in [(0.3, -0.2), (-0.45, 0.1), (0.25, 0.25)]:
        A = connection(np.array(r))
        print(f"// r = {r}")
        for row in A:
            print("  {" + ", ".join(f"{v:.17g}" for v in row) + "},")

    print("// zero-phase Butterworth oracle: order 2 per pass, dt 0.01, cutoff 2 Hz")
    dt, fc = 0.01, 2.0
    t = np.arange(600) * dt
    x = np.sin(2 * np.pi * 0.7 * t) + 0.4 * np.sin(2 * np.pi * 9.0 * t) + 0.1 * t
    b, a = signal.butter(2, fc, fs=1.0 / dt)
    y = signal.filtfilt(b, a, x, padtype="odd", padlen=300)
    for i in [150, 300, 450]:
        print(f"  {{{i}, {y[i]:.17g}}},")

    print("// exp map oracle: xi = (1, 0, pi/2), dt = 1, 1e5 RK4 substeps")
    xi = np.array([1.0, 0.0, np.pi / 2])
    def rhs(g):
        c, s = np.cos(g[2]), np.sin(g[2])
        return np.array([c * xi[0] - s * xi[1], s * xi[0] + c * xi[1], xi[2]])
    g = np.zeros(3)
    n = 100000
    h = 1.0 / n
    for _ in range(n):
        k1 = rhs(g); k2 = rhs(g + h / 2 * k1); k3 = rhs(g + h / 2 * k2); k4 = rhs(g + h * k3)
        g = g + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    print("  " + ", ".join(f"{v:.17g}" for v in g))


if __name__ == "__main__":
    main()
