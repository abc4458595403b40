"""Brute-force reference for the cluster fitting and classification pipeline.

Evaluates every cluster of the Table 1 fixture in 50-digit arithmetic and
prints the values frozen into tests/cluster_oracle.rs. Run:

    python3 crates/core/tests/oracles/pipeline_oracle.py
"""
import csv
import pathlib
from mpmath import mp, mpf, sqrt, log, loggamma, sign

mp.dps = 50
LOG_FLOOR = mpf(-690)
EPS = mpf("1e-9")

here = pathlib.Path(__file__).resolve().parents[2]
rows = list(csv.reader(open(here / "data" / "table1.csv")))[1:]
patients = [(r[0], [int(c) for c in r[1:]]) for r in rows]


def profile(codes):
    return tuple(c != 0 for c in codes)


def fit(samples):
    if not samples:
        return None, "empty sample"
    n = len(samples)
    xs = [mpf(x) for x in samples]
    m1 = sum(xs) / n
    m2 = sum((x - m1) ** 2 for x in xs) / n
    m3 = sum((x - m1) ** 3 for x in xs) / n
    m4 = sum((x - m1) ** 4 for x in xs) / n
    if m2 == 0:
        return None, "zero variance"
    if n < 4:
        return None, "too few samples"
    if len(set(samples)) < 4:
        return None, "too few distinct values"
    sk = m3 / m2 ** mpf(1.5)
    ku = m4 / m2 ** 2
    kd = 4 * (4 * ku - 3 * sk ** 2) * (2 * ku - 3 * sk ** 2 - 6)
    kappa = sk ** 2 * (ku + 3) ** 2 / kd
    symmetric = m3 == 0
    if not (kappa < -EPS or (abs(kappa) <= EPS and symmetric)):
        return None, "not type I (kappa=%s)" % mp.nstr(kappa, 8)
    h = (6 * ku - 6 * sk ** 2 - 6) / (6 + 3 * sk ** 2 - 2 * ku)
    rad = sk ** 2 * (h + 2) ** 2 + 16 * h + 16
    base = h / 2 - 1
    delta = mpf(0.5) * h * (h + 2) * abs(sk) / sqrt(rad)
    g2 = base + sign(m3) * delta
    g1 = base - sign(m3) * delta
    if g1 <= -1 or g2 <= -1:
        return None, "invalid exponents"
    span = mpf(0.5) * sqrt(m2 * rad)
    if symmetric:
        c1 = c2 = span / 2
        m0 = m1
    else:
        c1 = span * g1 / (g1 + g2)
        c2 = span - c1
        m0 = m1 - mpf(0.5) * m3 * (h + 2) / (m2 * (h - 2))
    if c1 <= 0 or c2 <= 0:
        return None, "invalid support"

    def xlx(g, s):
        return 0 if g == 0 else g * log(abs(g) if s is None else abs(s))

    ln_a0 = (
        (0 if g1 == 0 else g1 * log(abs(g1)))
        + (0 if g2 == 0 else g2 * log(abs(g2)))
        - (0 if g1 + g2 == 0 else (g1 + g2) * log(abs(g1 + g2)))
        + loggamma(g1 + g2 + 2)
        - log(c1 + c2)
        - loggamma(g1 + 1)
        - loggamma(g2 + 1)
    )
    return dict(mu1=m1, mu2=m2, mu3=m3, mu4=m4, sk=sk, ku=ku, kappa=kappa, h=h,
                g1=g1, g2=g2, c1=c1, c2=c2, m0=m0, ln_a0=ln_a0), None


def log_pdf(m, x):
    t = mpf(x) - m["m0"]
    if not (-m["c1"] < t < m["c2"]):
        return LOG_FLOOR
    v = m["ln_a0"] + m["g1"] * log(1 + t / m["c1"]) + m["g2"] * log(1 - t / m["c2"])
    return max(v, LOG_FLOOR)


# clusters: full-profile groups, numbered by first appearance (1-based)
clusters = []
for pid, codes in patients:
    for c in clusters:
        if c["profile"] == profile(codes):
            c["members"].append(pid)
            break
    else:
        clusters.append(dict(profile=profile(codes), members=[pid], codes=codes))
for i, c in enumerate(clusters, 1):
    c["id"] = i
    pooled = [x for pid, codes in patients if pid in c["members"] for x in codes if x != 0]
    c["model"], c["reason"] = fit(pooled)

for c in clusters:
    m = c["model"]
    if m is None:
        print(c["id"], c["members"], "Degenerate:", c["reason"])
    else:
        print(c["id"], c["members"], "Fitted",
              " ".join("%s=%s" % (k, mp.nstr(m[k], 17)) for k in
                       ["mu1", "mu2", "mu3", "mu4", "kappa", "h", "g1", "g2", "c1", "c2", "m0", "ln_a0"]))

new = [0, 2, 0, 4, 5, 6, 7, 0, 0, 0, 0]
print("exact match:", [c["id"] for c in clusters if c["profile"] == profile(new)])
scores = []
for c in clusters:
    if c["model"] is None:
        continue
    ll = sum(log_pdf(c["model"], x) for x in new if x != 0)
    scores.append((c["id"], ll))
    print("cluster", c["id"], "loglik", mp.nstr(ll, 17))
best = max(scores, key=lambda s: (s[1], -s[0]))
print("argmax cluster", best[0], [c["members"] for c in clusters if c["id"] == best[0]])
