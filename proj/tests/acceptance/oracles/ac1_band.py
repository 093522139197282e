"""Independent reference run for the additive-model band of the acceptance suite.

Additive model, d=10, xi=1 (independent Pareto(3) margins), sigma=0.1,
n_train=1e4, n_test=1e5, k=floor(sqrt(n)), 20 replications, beta ~ U[0,1]^d.
OLS with intercept on angles of the k_train largest rank-standardized training
points, scored on the k_test largest test points under the train ranks.
Prints mean, sample std and the band mean +- 3 std of the per-replication MSE.
"""
import numpy as np

D, ALPHA, SIGMA = 10, 3.0, 0.1
N_TRAIN, N_TEST, REPS = 10_000, 100_000, 20


def generate(n, beta, rng):
    x = (1.0 - rng.random((n, D))) ** (-1.0 / ALPHA)
    r = np.linalg.norm(x, axis=1)
    f = (x / r[:, None]) @ beta * (1.0 - 1.0 / (2.0 * np.sqrt(r)))
    z = rng.normal(0.0, SIGMA, n)
    return x, f + z * (np.abs(z) <= 1.0)


def rank_transform(train, x):
    n = train.shape[0]
    out = np.empty_like(x)
    for j in range(x.shape[1]):
        s = np.sort(train[:, j])
        c = np.searchsorted(s, x[:, j], side="right")
        out[:, j] = (n + 1.0) / (n + 1.0 - c)
    return out


def main():
    k_train, k_test = int(np.sqrt(N_TRAIN)), int(np.sqrt(N_TEST))
    mse = []
    for rep in range(REPS):
        rng = np.random.default_rng(20240 + rep)
        beta = rng.random(D)
        x, y = generate(N_TRAIN, beta, rng)
        xt, yt = generate(N_TEST, beta, rng)
        v, vt = rank_transform(x, x), rank_transform(x, xt)
        r, rt = np.linalg.norm(v, axis=1), np.linalg.norm(vt, axis=1)
        top = np.argsort(-r, kind="stable")[:k_train]
        ttop = np.argsort(-rt, kind="stable")[:k_test]
        a = np.c_[np.ones(k_train), v[top] / r[top, None]]
        coef = np.linalg.lstsq(a, y[top], rcond=None)[0]
        at = np.c_[np.ones(k_test), vt[ttop] / rt[ttop, None]]
        mse.append(np.mean((at @ coef - yt[ttop]) ** 2))
    mse = np.asarray(mse)
    m, s = mse.mean(), mse.std(ddof=1)
    print(f"mean={m:.6g} std={s:.6g} band=[{m - 3 * s:.6g}, {m + 3 * s:.6g}]")


if __name__ == "__main__":
    main()
