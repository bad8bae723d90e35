"""Writes fs_norming_oracle.csv to stdout: log of the orbit integral
int_0^inf t^alpha (1+t)^(-k-2) dt for CP^1 with the Fubini-Study metric,
by mpmath quadrature at 30 digits (independent of the C++ library)."""
import sys
import mpmath as mp

mp.mp.dps = 30
out = sys.stdout
out.write("k,alpha,log_q\n")
for k in range(1, 33):
    for a in range(k + 1):
        f = lambda t: t ** a * (1 + t) ** (-k - 2)
        val = mp.quad(f, [0, 1, mp.inf])
        out.write(f"{k},{a},{mp.nstr(mp.log(val), 20)}\n")
