"""Reference Gamma-ratio values g_k^(alpha-1) = Γ(k+1-a)/(Γ(1-a)Γ(k+1)), mpmath at 50 digits."""
import mpmath as mp

mp.mp.dps = 50

for a in ["0.4", "0.6", "0.7", "0.9"]:
    a = mp.mpf(a)
    vals = []
    for k in [0, 1, 2, 3, 10, 100, 999, 5000]:
        vals.append(mp.nstr(mp.gamma(k + 1 - a) / (mp.gamma(1 - a) * mp.gamma(k + 1)), 20))
    print(mp.nstr(a, 3), ", ".join(vals))
