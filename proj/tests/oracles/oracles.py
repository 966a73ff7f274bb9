"""Independent reference computations for the frozen values in the C++ tests.

Plain Python, no dependencies. Not run by ctest; rerun by hand when a frozen
value is questioned:  python3 tests/oracles/oracles.py
"""

import math


def harmonic(n):
    xs, s = [0.0], 0.0
    for k in range(1, n):
        s += 1.0 / k
        xs.append(s)
    return xs


def witness_rows(xs, eps, j_max):
    """m(j) = least m >= j having a partner, n(j) = least partner of m(j); brute force."""
    rows = []
    for j in range(j_max + 1):
        found = None
        for m in range(j, len(xs)):
            for n in range(m + 1, len(xs)):
                if abs(xs[m] - xs[n]) >= eps:
                    found = (m, n)
                    break
            if found:
                break
        if not found:
            break
        rows.append((j,) + found)
    return rows


def j_eps(xs, eps):
    k = len(xs) - 1
    while k > 0 and abs(xs[k - 1] - xs[k]) < eps:
        k -= 1
    return k


def equality_orbit_steps(phi, r0, tol, max_iters):
    r = r0
    for n in range(max_iters + 1):
        if r < tol:
            return n
        r = phi(r)
    return None


def picard_stop(x0, tol=1e-9, window=8):
    """d = max(x, y), T = x/2: rho_n = x_n; stop once the last `window` rho are <= tol."""
    x, rho = x0, []
    while True:
        nxt = x / 2
        rho.append(max(x, nxt))
        x = nxt
        if len(rho) >= window and all(r <= tol for r in rho[-window:]):
            return len(rho)


if __name__ == "__main__":
    xs = harmonic(2001)
    rows = witness_rows(xs, 0.5, 100)
    print("harmonic j_eps:", j_eps(xs, 0.5))
    print("harmonic rows 0..5:", rows[:6])
    print("harmonic row 100:", rows[100])
    print("harmonic sum m, sum n:", sum(r[1] for r in rows), sum(r[2] for r in rows))

    phi = lambda t: t / (1 + t)
    r, worst = 1.0, 0.0
    for n in range(10001):
        worst = max(worst, abs(r - 1 / (1 + n)))
        r = phi(r)
    print("t/(1+t) orbit max |r_n - 1/(1+n)|:", worst)

    hyb = lambda t: t / 2 if t < 1 else t - 0.25
    print("if(t<1,t/2,t-0.25) from 10 below 1e-9 after:", equality_orbit_steps(hyb, 10.0, 1e-9, 200))
    print("t/2 from 1 below 1e-9 after:", equality_orbit_steps(lambda t: t / 2, 1.0, 1e-9, 200))

    for x0 in (1.0, 0.7, 0.3):
        print("max/halving iterations from", x0, ":", picard_stop(x0))

    # Matthews on d = x + y, per ordered pair: the largest excess d(x,x) - d(x,y) over the grid.
    g = [i / 64 for i in range(65)]
    best = None
    for x in g:
        for y in g:
            e = 2 * x - (x + y)
            if e > 1e-12 and (best is None or e > best[0]):
                best = (e, x, y)
    print("matthews d=x+y witness (excess, x, y):", best)

    # Triangle on the 3-point table: largest excess d(x,z) - d(x,y) - d(y,z).
    m = [[0, 1, 3], [1, 0, 1], [3, 1, 2]]
    best = None
    for x in range(3):
        for y in range(3):
            for z in range(3):
                e = m[x][z] - m[x][y] - m[y][z]
                if e > 1e-12 and (best is None or e > best[0]):
                    best = (e, x, y, z)
    print("triangle witness (excess, x, y, z):", best)
