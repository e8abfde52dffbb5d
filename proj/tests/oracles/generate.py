"""Independent high-precision reference values for the unit and acceptance tests.

Uses mpmath at 40 digits and direct (non-rationalized) forms of the model
equations. Output is pasted into tests/oracles.hpp.
"""
import mpmath as mp

mp.mp.dps = 40

K_B = mp.mpf("1.380649e-23")
Q = mp.mpf("1.602176634e-19")
T0 = mp.mpf("273.15")
TREF = mp.mpf("298.15")


def ut(t_k):
    return K_B * t_k / Q


def F(i):
    s = mp.sqrt(1 + i)
    return s - 2 + mp.log(s - 1)


def G(i):
    s = mp.sqrt(1 + i)
    return s + mp.log(s - 1)


def finv(v):
    return mp.exp(mp.findroot(lambda u: F(mp.exp(u)) - v, mp.mpf(0) if v > -3 else v))


def solve_if2(alpha, k, dvt, n, u):
    rhs = mp.log(k) + dvt / (n * u)
    f = lambda x: G(alpha * mp.exp(x)) - G(mp.exp(x)) - rhs
    lo, hi = mp.mpf(-40), mp.mpf(15)
    for _ in range(400):
        mid = (lo + hi) / 2
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return mp.exp((lo + hi) / 2)


def beta_of(vx, i, n, u):
    target = vx * (n - 1) / (n * u)
    f = lambda lb: G(i) - G(mp.exp(lb) * i) - target
    lo, hi = mp.mpf(-30), mp.mpf(0)
    for _ in range(400):
        mid = (lo + hi) / 2
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return mp.exp((lo + hi) / 2)


def s_iref(i, a, n, u):
    br = a / (mp.sqrt(1 + a * i) - 1) - 1 / (mp.sqrt(1 + i) - 1)
    return 2 / (i * n * u) / br


def box_tc(ts, vals):
    mean = sum(vals) / len(vals)
    return (max(vals) - min(vals)) / (mean * (ts[-1] - ts[0])) * 10**6


def show(name, v):
    print(f"inline constexpr double {name} = {mp.nstr(v, 17, min_fixed=-3, max_fixed=3)};")


n = mp.mpf("1.2")
u25 = ut(TREF)
show("kUt25", u25)
show("kF_0p01", F(mp.mpf("0.01")))
show("kF_1em12", F(mp.mpf("1e-12")))
show("kF_1", F(mp.mpf(1)))
show("kF_100", F(mp.mpf(100)))
show("kFinv_m10", finv(mp.mpf(-10)))
show("kFinv_5", finv(mp.mpf(5)))
show("kVxScm_1_5", n * mp.mpf("0.02585") * (G(5 * mp.mpf(1)) - G(mp.mpf(1))))
show("kVxBm_6_20m", n * mp.mpf("0.025693") * mp.log(6) + mp.mpf("0.02"))

# Generic design point: K = 6, alpha = 2.9, dV_T = 20 mV, n = 1.2, m = 1.25.
i25 = solve_if2(mp.mpf("2.9"), 6, mp.mpf("0.02"), n, u25)
show("kIf2Generic25", i25)
show("kSirefGeneric25", s_iref(i25, mp.mpf("2.9"), n, u25))
vx25 = n * u25 * mp.log(6) + mp.mpf("0.02")
show("kVxGeneric25", vx25)
show("kBetaGeneric25", beta_of(vx25, i25, n, u25))
show("kS2Generic", mp.mpf("1.25e-9") / (mp.mpf("100e-9") * i25))
vx68 = n * u25 * (G(mp.mpf("2.9") * mp.mpf("6.8")) - G(mp.mpf("6.8")))
show("kVxScm_6p8_2p9", vx68)
show("kBeta_6p8", beta_of(vx68, mp.mpf("6.8"), n, u25))

grid = [mp.mpf(-40 + 5 * k) for k in range(26)]
m = mp.mpf("1.25")
vals = []
for tc in grid:
    tk = tc + T0
    i = solve_if2(mp.mpf("2.9"), 6, mp.mpf("0.02"), n, ut(tk))
    vals.append((tk / TREF) ** (2 - m) * i)
show("kTcGeneric", box_tc(grid, vals))
i85 = solve_if2(mp.mpf("2.9"), 6, mp.mpf("0.02"), n, ut(85 + T0))
show("kIref85Generic", mp.mpf("1.25e-9") * ((85 + T0) / TREF) ** (2 - m) * i85 / i25)

# PTAT law TC (dV_T = 0), m = 1.25.
law = [((tc + T0) / TREF) ** (2 - m) for tc in grid]
show("kTcPtatLaw", box_tc(grid, law))

# Bias generator: dVT0 = 0.15 V, S9/S8 = 0.1, equal I_SQ.
show("kVsb6Example", mp.mpf("0.15") + n * u25 * mp.log(mp.mpf("0.1")))
show("kDvtBulkExample", mp.mpf("0.4") * (mp.sqrt(mp.mpf("0.8")) - mp.sqrt(mp.mpf("0.8") - mp.mpf("0.1"))))
show("kDvtFdsoiExample", mp.mpf("0.165") * mp.mpf("0.1067"))
show("kDominantPole", mp.mpf("100e-9") / (2 * mp.pi * mp.mpf("1e-12") * 100))
show("kBoxTcLinear", (mp.mpf("0.1") / mp.mpf("1.05")) / 125 * 10**6)
show("kBoxLsExample", (mp.mpf("0.01") / mp.mpf("1.005")) / mp.mpf("0.9") * 100)
