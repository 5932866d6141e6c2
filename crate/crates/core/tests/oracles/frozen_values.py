# Independent high-precision oracle for values frozen into the Rust tests.
# Run: python3 frozen_values.py
import mpmath as mp

mp.mp.dps = 40


def show(name, v):
    print(f"{name} = {mp.nstr(v, 20)}")


# matrix-variate gamma
show("ln_gamma(2.5)", mp.loggamma(2.5))
show("ln(pi/2)", mp.log(mp.pi / 2))
show("ln(pi^2/2)", mp.log(mp.pi**2 / 2))

# scalar operator closed forms
show("kober1 zeta=1 alpha=0.5 f=v^2 u=1", mp.gamma(4) / mp.gamma(4.5))
show("kober2 zeta=1 lambda=1 alpha=0.5 u=2", mp.mpf(1) / 2 * mp.gamma(2) / mp.gamma(2.5))
show("rl lambda=1 alpha=0.5 x=1", mp.gamma(2) / mp.gamma(2.5))
show("2/sqrt(pi)", 2 / mp.sqrt(mp.pi))

# Gauss hypergeometric, including arguments near one
for (a, b, c, z) in [
    (0.5, 0.3, 0.3, 0.36),
    (1, 1, 2, 0.5),
    (0.75, -0.5, 0.5, 0.3),
    (0.75, -0.5, 0.5, 0.9),
    (0.75, -0.5, 0.5, 0.999999),
    (1, 1, 2, 0.99),
    (0.5, 0.5, 1, 0.999),
    (1.5, 0.25, 2.5, 0.8),
    (0.3, 0.7, 1.2, -3.0),
    (2, -3, 1.5, 0.95),
]:
    show(f"2F1({a},{b};{c};{z})", mp.hyp2f1(a, b, c, z))


# Saigo first-kind operator on v^lambda, by tanh-sinh quadrature of the defining integral
def saigo(alpha, beta, gamma, zeta, lam, u):
    u = mp.mpf(u)
    def integrand(v):
        return (u - v) ** (alpha - 1) * v**zeta * mp.hyp2f1(alpha + beta, -gamma, alpha, 1 - v / u) * v**lam
    val = mp.quad(integrand, [0, u / 2, u])
    return u ** (-zeta - alpha) / mp.gamma(alpha) * val


for zeta in (0.5, 1.0):
    for lam in (0.0, 1.0, 2.5):
        for u in (0.7, 1.3):
            show(f"saigo a=0.5 b=0.25 g=0.5 zeta={zeta} lam={lam} u={u}", saigo(0.5, 0.25, 0.5, zeta, lam, u))

for (a, b, g) in [(1.3, -0.4, 0.8), (0.7, 0.6, 1.2)]:
    for (zeta, lam, u) in [(0.5, 1.0, 0.9), (1.5, 2.0, 1.7), (0.2, 0.5, 2.4)]:
        show(f"saigo a={a} b={b} g={g} zeta={zeta} lam={lam} u={u}", saigo(a, b, g, zeta, lam, u))
