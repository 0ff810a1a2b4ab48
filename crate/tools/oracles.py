"""Independent hand-calculator for the frozen values in the integration tests.

Plain Python floats, no code shared with the crate. Run with
`python3 tools/oracles.py` and paste the printed literals.
"""
import math

# rear-axle kinematics: u=2, psi=pi/2, delta=0.1, wheelbase 2
u, psi, delta, L = 2.0, math.pi / 2, 0.1, 2.0
print("rear_axle_rates", repr(u * math.cos(psi)), repr(u * math.sin(psi)), repr(u * math.tan(delta) / L))

# lateral/yaw model by substituting the linear tyre forces into the force and
# moment balance, column by column
def yaw_model(m, iz, lf, lr, cf, cr, u):
    def rhs(v, g, d):
        af = (v + lf * g) / u - d
        ar = (v - lr * g) / u
        ff, fr = -cf * af, -cr * ar
        return ((ff + fr) / m - u * g, (lf * ff - lr * fr) / iz)
    cv, cg, cd = rhs(1, 0, 0), rhs(0, 1, 0), rhs(0, 0, 1)
    return [[cv[0], cg[0]], [cv[1], cg[1]]], [cd[0], cd[1]]

a, b = yaw_model(1000.0, 1000.0, 1.0, 1.0, 50000.0, 50000.0, 2.0)
print("symmetric_a11", repr(a[0][0]))
for speed in (1.5, 3.0):
    a, b = yaw_model(1100.0, 800.0, 1.0, 0.7, 20000.0, 35000.0, speed)
    print("default_yaw", speed, [repr(x) for x in (a[0][0], a[0][1], a[1][0], a[1][1], b[0], b[1])])
    # steady state z = -A^-1 B for unit steering
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    v = -(a[1][1] * b[0] - a[0][1] * b[1]) / det
    g = -(-a[1][0] * b[0] + a[0][0] * b[1]) / det
    print("steady_state_unit_delta", speed, repr(v), repr(g))

# figure-eight at t = 17.3 s, Ax = 20, Ay = 10, T = 120
t, ax, ay, T = 17.3, 20.0, 10.0, 120.0
w = 2 * math.pi / T
print("figure_eight", [repr(x) for x in (ax * math.sin(w * t), ay * math.sin(2 * w * t),
                                         ax * w * math.cos(w * t), 2 * ay * w * math.cos(2 * w * t))])

# kinematic control law at one pose
xd, yd, xdd, ydd = 1.0, 2.0, 0.5, -0.3
x, y, p, ke, ks, lr = 0.6, 2.5, 0.4, 1.0, 1.0, 0.7
vx = xdd + ks * math.tanh(ke * (xd - x))
vy = ydd + ks * math.tanh(ke * (yd - y))
print("kinematic_control", repr(math.cos(p) * vx + math.sin(p) * vy), repr((-math.sin(p) * vx + math.cos(p) * vy) / lr))
