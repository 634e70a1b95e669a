#!/usr/bin/env python3
"""High-precision reference values for the L-network circuit tests.

Evaluates the network equations with mpmath at 50 significant digits and
prints the constants that are frozen into tests/test_circuit.cpp.
"""
from mpmath import mp, mpc, mpf, pi, sqrt

mp.dps = 50

def input_impedance(cp, cs, f, zl):
    w = 2 * pi * f
    bp = w * cp
    bs = w * cs
    return 1 / (mpc(0, 1) * bp + 1 / (zl + 1 / (mpc(0, 1) * bs)))

def reflection(zin, rs):
    return (zin - rs) / (zin + rs)

def load_from_caps(cp, cs, f, rs):
    w = 2 * pi * f
    bp = w * cp
    bs = w * cs
    return 1 / (1 / mpf(rs) - mpc(0, 1) * bp) + mpc(0, 1) / bs

def show(name, z):
    print(f"{name} = {mp.nstr(z.real, 20)}  {mp.nstr(z.imag, 20)}j")

# golden 1: Z_in at cp=5 pF, cs=10 pF, f=1.5 GHz, Z_L = 30+20j
zin = input_impedance(mpf(5e-12), mpf(10e-12), mpf(1.5e9), mpc(30, 20))
show("zin_5_10_1g5", zin)

# golden 2: chained reflection coefficient of golden 1 with rs=50
show("gamma_5_10_1g5", reflection(zin, mpf(50)))

# golden 3: Z_L synthesized from cp*=cs*=11 pF at 1 GHz, rs=50
zl = load_from_caps(mpf(11e-12), mpf(11e-12), mpf(1e9), 50)
show("zl_11_11_1g", zl)

# sanity: feeding golden 3 back through the network gives 50 + 0j
zin_rt = input_impedance(mpf(11e-12), mpf(11e-12), mpf(1e9), zl)
show("roundtrip_zin", zin_rt)
print("roundtrip |gamma| =", mp.nstr(abs(reflection(zin_rt, mpf(50))), 5))
