"""Small closed-form / 1-D quadrature references."""
import mpmath as mp

mp.mp.dps = 30

# weighted integral of sign(x), n = 1, p = 1, R = 1
# in t = log x the weight is smooth apart from |t|^3 at 0; split densely
w = 2 * mp.quad(lambda t: mp.exp(t) / (1 + mp.exp(t) * abs(t) ** 3),
                [-mp.inf, -10, -3, -1, -0.5, 0, 0.5, 1, 2, 3, 5, 10, 30, 100, mp.inf], maxdegree=10)
print("weighted_sign_1d", mp.nstr(w, 20))
# mollifier normalizers
z1 = mp.quad(lambda x: mp.exp(-1 / (1 - x * x)), [-1, 0, 1])
z2 = 2 * mp.pi * mp.quad(lambda r: mp.exp(-1 / (1 - r * r)) * r, [0, 1])
print("Z1", mp.nstr(z1, 20), "Z2", mp.nstr(z2, 20))
# L^q norms of hat
for n, q in [(1, 2), (1, 4), (2, 4)]:
    if n == 1:
        v = 2 / mp.mpf(q + 1)
    else:
        v = 2 * mp.pi * mp.quad(lambda r: (1 - r) ** q * r, [0, 1])
    print("hat_Lq n=%d q=%d" % (n, q), mp.nstr(v, 20))
# gauss: int exp(-q|x|^2)
print("gauss_L2sq_1d", mp.nstr(mp.sqrt(mp.pi / 2), 20))
