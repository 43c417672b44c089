"""The generalized clique-Lagrangian problem and the large-deviation rates.

The central object is

    L_theta(k) = sup { sum_{i != j} |v_i|^theta |v_j|^theta : ||v||_1 = 1 },

a theta-power generalization of the Motzkin-Straus clique Lagrangian
(theta = 1 gives exactly (k-1)/k).  Its maximizer always has at most two
distinct nonzero entries, which reduces the solve to a one-dimensional
search per block split.  Everything downstream - the heavy-tail planting
cost, its minimizing clique size, the Gaussian comparison curve, the
light-tail star profile and the typical-value formulas - is evaluated here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class InsufficientRangeError(ValueError):
    """k_max does not reach the plateau of the clique Lagrangian."""


class BruteForceBudgetError(ValueError):
    """Brute-force enumeration requested beyond its supported size."""


@dataclass(frozen=True)
class VariationalSolution:
    """Two-block maximizer of the clique Lagrangian.

    The optimal vector is (x,...,x, y,...,y, 0,...,0) with k1 copies of x and
    k2 of y, k1*x + k2*y = 1, and

        value = 2*C(k1,2)*x**(2t) + 2*C(k2,2)*y**(2t) + 2*k1*k2*(x*y)**t.
    """

    theta: float
    k: int
    value: float
    k1: int
    k2: int
    x: float
    y: float


def _block_value(theta: float, k1: int, k2: int, x: float, y: float) -> float:
    t2 = 2.0 * theta
    val = k1 * (k1 - 1) * x**t2
    if k2 > 0 and y > 0.0:
        val += k2 * (k2 - 1) * y**t2 + 2.0 * k1 * k2 * (x * y) ** theta
    return val


def _block_deriv(theta: float, k1: int, k2: int, x: float) -> float:
    # d/dx of the block objective along the constraint y = (1 - k1*x)/k2.
    y = (1.0 - k1 * x) / k2
    t2 = 2.0 * theta
    dy = -k1 / k2
    d = k1 * (k1 - 1) * t2 * x ** (t2 - 1.0)
    d += k2 * (k2 - 1) * t2 * y ** (t2 - 1.0) * dy
    d += 2.0 * k1 * k2 * theta * (x * y) ** (theta - 1.0) * (y + x * dy)
    return d


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(g, lo: float, hi: float, xtol: float = 1e-14):
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    gc, gd = g(c), g(d)
    while b - a > xtol:
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - _INVPHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _INVPHI * (b - a)
            gd = g(d)
    return (a + b) / 2.0


def _maximize_block(theta: float, k1: int, k2: int) -> tuple[float, float, float]:
    """Best (value, x, y) for the split (k1, k2), k1 >= k2 >= 1."""
    lo = 1.0 / (k1 + k2)
    hi = 1.0 / k1

    def g(x: float) -> float:
        return _block_value(theta, k1, k2, x, max(0.0, (1.0 - k1 * x) / k2))

    # Coarse bracket, then golden section, then a guarded Newton polish.
    xs = np.linspace(lo, hi, 201)
    ys = np.maximum(0.0, (1.0 - k1 * xs) / k2)
    vals = k1 * (k1 - 1) * xs ** (2.0 * theta)
    vals = vals + k2 * (k2 - 1) * ys ** (2.0 * theta) + 2.0 * k1 * k2 * (xs * ys) ** theta
    j = int(np.argmax(vals))
    a = xs[max(0, j - 1)]
    b = xs[min(len(xs) - 1, j + 1)]
    x = _golden_max(g, float(a), float(b))
    h = max(1e-9, 1e-7 * (hi - lo))
    if lo + h < x < hi - h:
        d2 = (_block_deriv(theta, k1, k2, x + h) - _block_deriv(theta, k1, k2, x - h)) / (2.0 * h)
        if d2 < 0.0:
            step = _block_deriv(theta, k1, k2, x) / d2
            xn = min(max(x - step, lo), hi)
            if g(xn) >= g(x):
                x = xn
    # Exact endpoints: uniform on the full support and uniform on block 1.
    best_x, best_v = x, g(x)
    for cand in (lo, hi):
        v = g(cand)
        if v > best_v:
            best_x, best_v = cand, v
    y = (1.0 - k1 * best_x) / k2
    return best_v, best_x, max(y, 0.0)


@lru_cache(maxsize=None)
def _solve(theta: float, k: int) -> VariationalSolution:
    best = VariationalSolution(theta, k, 0.0, 1, 0, 1.0, 0.0)

    def improves(v: float) -> bool:
        # Relative comparison keeps the smallest support on numerical ties
        # without discarding genuinely tiny values (large theta underflows).
        return v > best.value and v - best.value > 1e-12 * v

    # Supports are scanned in increasing size.
    for support in range(2, k + 1):
        # Uniform vector on the support (the k2 = 0 family).
        xu = 1.0 / support
        vu = support * (support - 1) * xu ** (2.0 * theta)
        if improves(vu):
            best = VariationalSolution(theta, k, vu, support, 0, xu, 0.0)
        for k1 in range((support + 1) // 2, support):
            k2 = support - k1
            v, x, y = _maximize_block(theta, k1, k2)
            if improves(v):
                best = VariationalSolution(theta, k, v, k1, k2, x, y)
    return best


def clique_lagrangian(theta: float, k: int, tol: float = 1e-10) -> VariationalSolution:
    """Solve the two-block reduction of the clique Lagrangian.

    The returned value is accurate to roughly 1e-13 (well inside any
    requested ``tol`` >= 1e-12); the maximizing vector is reported as
    (k1, k2, x, y).
    """
    if not theta > 1.0:
        raise ValueError(f"need theta > 1 (use motzkin_straus_value for theta == 1), got {theta}")
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    if tol < 1e-12:
        raise ValueError(f"solver resolves to ~1e-13; tol={tol} cannot be honored")
    return _solve(float(theta), int(k))


def motzkin_straus_value(k: int) -> float:
    """Classical Motzkin-Straus value (k-1)/k for the theta = 1 problem."""
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    return (k - 1) / k


def lagrangian_global_bound(theta: float) -> float:
    """k-independent upper bound r**(2t-2) - r**(2t-1) with r = (2t-2)/(2t-1)."""
    if not theta > 1.0:
        raise ValueError(f"need theta > 1, got {theta}")
    r = (2.0 * theta - 2.0) / (2.0 * theta - 1.0)
    return r ** (2.0 * theta - 2.0) - r ** (2.0 * theta - 1.0)


def lagrangian_closed_form(theta: float, k: int) -> float | None:
    """Closed form 1/k**(2t-2) - 1/k**(2t-1), available for small k.

    Valid whenever k <= (2t-1)/(2t-2); k = 2 always has the closed form
    2**(1-2t).  Returns None outside the closed-form regime.
    """
    if not theta > 1.0:
        raise ValueError(f"need theta > 1, got {theta}")
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    if k == 2:
        return 2.0 ** (1.0 - 2.0 * theta)
    ratio = (2.0 * theta - 1.0) / (2.0 * theta - 2.0)
    if k <= ratio * (1.0 + 1e-12) + 1e-9:
        return k ** (2.0 - 2.0 * theta) - k ** (1.0 - 2.0 * theta)
    return None


def lagrangian_plateau(theta: float, k_max: int, tol: float = 1e-9) -> int | None:
    """Smallest k* with L_theta constant on [k*, k_max] (within ``tol``).

    Returns None when no plateau is observable: either k_max < 3 (no
    constant step can be seen) or the value is still increasing at k_max.
    """
    if k_max < 2:
        raise ValueError(f"need k_max >= 2, got {k_max}")
    if k_max < 3:
        return None
    vals = [clique_lagrangian(theta, k).value for k in range(2, k_max + 1)]
    if vals[-1] - vals[-2] > tol:
        return None
    last = vals[-1]
    for i, v in enumerate(vals):
        if v >= last - tol:
            return i + 2
    return k_max


# ---------------------------------------------------------------------------
# Independent brute-force evaluator (grid + projected gradient ascent).
# ---------------------------------------------------------------------------


def project_simplex_rows(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    idx = np.arange(1, v.shape[1] + 1)
    cond = u - css / idx > 0
    rho = v.shape[1] - 1 - np.argmax(cond[:, ::-1], axis=1)
    tau = css[np.arange(v.shape[0]), rho] / (rho + 1)
    return np.maximum(v - tau[:, None], 0.0)


def _compositions(total: int, parts: int) -> np.ndarray:
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    blocks = []
    for first in range(total + 1):
        rest = _compositions(total - first, parts - 1)
        head = np.full((rest.shape[0], 1), first, dtype=np.int64)
        blocks.append(np.hstack([head, rest]))
    return np.vstack(blocks)


def _pair_power_objective(theta: float, f: np.ndarray) -> np.ndarray:
    s = np.sum(f**theta, axis=1)
    r = np.sum(f ** (2.0 * theta), axis=1)
    return s * s - r


_DEFAULT_GRID = {2: 4000, 3: 400, 4: 120, 5: 64, 6: 40}


def clique_lagrangian_bruteforce(
    theta: float,
    k: int,
    grid: int | None = None,
    refine_steps: int = 3000,
    starts: int = 10,
) -> float:
    """Grid enumeration over the simplex plus projected-gradient refinement.

    Deliberately independent of the two-block solver; returns a feasible
    objective value, hence a lower bound converging to the true supremum as
    the grid is refined.  Supports k <= 6 only.
    """
    if not theta > 1.0:
        raise ValueError(f"need theta > 1, got {theta}")
    if not 2 <= k <= 6:
        raise BruteForceBudgetError(f"brute force supports 2 <= k <= 6, got {k}")
    if grid is None:
        grid = _DEFAULT_GRID[k]
    pts = _compositions(int(grid), k).astype(float) / float(grid)
    vals = _pair_power_objective(theta, pts)
    order = np.argsort(vals)[::-1][: max(1, starts)]
    f = pts[order].copy()
    lr = np.full(f.shape[0], 0.25)
    best = float(vals[order[0]])
    cur = vals[order]
    for _ in range(refine_steps):
        s = np.sum(f**theta, axis=1, keepdims=True)
        grad = 2.0 * theta * f ** (theta - 1.0) * (s - f**theta)
        cand = project_simplex_rows(f + lr[:, None] * grad)
        cv = _pair_power_objective(theta, cand)
        improved = cv > cur
        f = np.where(improved[:, None], cand, f)
        cur = np.where(improved, cv, cur)
        lr = np.where(improved, lr * 1.2, lr * 0.5)
        if np.all(lr < 1e-18):
            break
    return max(best, float(cur.max()))


# ---------------------------------------------------------------------------
# Rate functions and typical values.
# ---------------------------------------------------------------------------


def conjugate_exponent(alpha: float) -> float:
    """b with 1/alpha + 1/b = 1; requires alpha > 1."""
    if not alpha > 1.0:
        raise ValueError(f"conjugate exponent needs alpha > 1, got {alpha}")
    return alpha / (alpha - 1.0)


def clique_planting_cost(alpha: float, delta: float, k: int) -> float:
    """Cost exponent of forcing a (1+delta)-deviation through a k-clique:

        k*(k-3)/2 + (1/2) * (1+delta)**alpha * L_{b/2}(k)**(1-alpha)

    with b the conjugate of alpha; defined for 1 < alpha < 2.
    """
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"clique planting cost needs 1 < alpha < 2, got {alpha}")
    if delta <= -1.0:
        raise ValueError(f"need delta > -1, got {delta}")
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    beta = conjugate_exponent(alpha)
    lag = clique_lagrangian(beta / 2.0, k).value
    if lag == 0.0:
        raise ValueError(
            f"the Lagrangian underflows at exponent {beta / 2.0} (alpha={alpha} too close to 1); "
            "use the alpha <= 1 rate"
        )
    return k * (k - 3) / 2.0 + 0.5 * (1.0 + delta) ** alpha * lag ** (1.0 - alpha)


def heavy_upper_rate(alpha: float, delta: float, k_max: int = 64) -> tuple[float, int]:
    """Upper-tail rate for heavy tails (alpha < 2) and its optimal clique size.

    For alpha <= 1 the rate is (1+delta)**alpha - 1, realized by a single
    heavy edge (clique size 2).  For 1 < alpha < 2 the planting cost is
    minimized over k in [2, k_max]; k_max must reach the Lagrangian plateau,
    beyond which the cost is strictly increasing, so the restriction is
    exact.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"heavy rate needs 0 < alpha < 2, got {alpha}")
    if not delta > 0.0:
        raise ValueError(f"need delta > 0, got {delta}")
    if alpha <= 1.0:
        return (1.0 + delta) ** alpha - 1.0, 2
    beta = conjugate_exponent(alpha)
    if lagrangian_plateau(beta / 2.0, k_max) is None:
        raise InsufficientRangeError(
            f"k_max={k_max} does not reach the plateau of the clique Lagrangian "
            f"at exponent {beta / 2.0}; increase k_max"
        )
    best_k, best = 2, clique_planting_cost(alpha, delta, 2)
    for k in range(3, k_max + 1):
        c = clique_planting_cost(alpha, delta, k)
        if c < best - 1e-12:
            best_k, best = k, c
    return best, best_k


def gaussian_planting_cost(delta: float, k: int) -> float:
    """Gaussian-weights comparison curve k*(k-3)/2 + (1+delta)/2 * k/(k-1)."""
    if not delta > 0.0:
        raise ValueError(f"need delta > 0, got {delta}")
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    return k * (k - 3) / 2.0 + 0.5 * (1.0 + delta) * k / (k - 1)


def gaussian_upper_rate(delta: float, k_max: int = 200) -> tuple[float, int]:
    """Minimum of the Gaussian comparison curve over k in [2, k_max]."""
    best_k, best = 2, gaussian_planting_cost(delta, 2)
    for k in range(3, k_max + 1):
        c = gaussian_planting_cost(delta, k)
        if c < best - 1e-12:
            best_k, best = k, c
    return best, best_k


def light_prefactor(alpha: float) -> float:
    """n-independent prefactor 2**(1/a) * a**(-1/2) * (a-2)**(1/2 - 1/a)."""
    if not alpha > 2.0:
        raise ValueError(f"light-tail formulas need alpha > 2, got {alpha}")
    return 2.0 ** (1.0 / alpha) * alpha**-0.5 * (alpha - 2.0) ** (0.5 - 1.0 / alpha)


def typical_light(alpha: float, n: float) -> float:
    """Typical largest eigenvalue for alpha > 2:

        prefactor * (log n)**(1/2) / (log log n)**(1/2 - 1/alpha).
    """
    logn = math.log(n)
    if logn <= 1.0:
        raise ValueError(f"need log log n > 0, got n={n}")
    return light_prefactor(alpha) * logn**0.5 / math.log(logn) ** (0.5 - 1.0 / alpha)


def typical_heavy(alpha: float, n: float) -> float:
    """Typical largest eigenvalue (log n)**(1/alpha) for alpha < 2."""
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"heavy-tail formulas need 0 < alpha < 2, got {alpha}")
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    return math.log(n) ** (1.0 / alpha)


def light_upper_rate(delta: float) -> float:
    """Upper-tail rate (1+delta)**2 - 1, universal over alpha > 2."""
    if not delta > 0.0:
        raise ValueError(f"need delta > 0, got {delta}")
    return (1.0 + delta) ** 2 - 1.0


def light_lower_rate(delta: float) -> float:
    """Lower-tail double-log rate 1 - (1-delta)**2 for delta in (0,1)."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"need 0 < delta < 1, got {delta}")
    return 1.0 - (1.0 - delta) ** 2


def heavy_lower_rate(alpha: float, delta: float) -> float:
    """Lower-tail double-log rate 1 - (1-delta)**alpha for alpha < 2."""
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"need 0 < alpha < 2, got {alpha}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"need 0 < delta < 1, got {delta}")
    return 1.0 - (1.0 - delta) ** alpha


def star_gamma(alpha: float, delta: float) -> float:
    """Optimal star-degree fraction (1+delta)**2 * (1 - 2/alpha), alpha > 2."""
    if not alpha > 2.0:
        raise ValueError(f"need alpha > 2, got {alpha}")
    if delta <= -1.0:
        raise ValueError(f"need delta > -1, got {delta}")
    return (1.0 + delta) ** 2 * (1.0 - 2.0 / alpha)


def star_rate_profile(alpha: float, rho: float, x: float) -> float:
    """Exponent profile of the best star of degree fraction x:

        1 - x - (1+rho)**a * (2/(a-2)) * (1-2/a)**(a/2) * x**(1-a/2).
    """
    if not alpha > 2.0:
        raise ValueError(f"need alpha > 2, got {alpha}")
    if rho <= -1.0:
        raise ValueError(f"need rho > -1, got {rho}")
    if not x > 0.0:
        raise ValueError(f"need x > 0, got {x}")
    coef = (1.0 + rho) ** alpha * (2.0 / (alpha - 2.0)) * (1.0 - 2.0 / alpha) ** (alpha / 2.0)
    return 1.0 - x - coef * x ** (1.0 - alpha / 2.0)


def star_rate_profile_max(alpha: float, rho: float) -> tuple[float, float]:
    """Closed-form (argmax, max) of the star profile:

        argmax = (1+rho)**2 * (1-2/alpha),   max = 1 - (1+rho)**2.
    """
    gamma = star_gamma(alpha, rho)
    return gamma, 1.0 - (1.0 + rho) ** 2


def tree_pair_power_bound(theta: float, total: float, cap: float) -> float:
    """Upper bound on sum over tree edges of f_i**t f_j**t when sum f = total
    and every entry is capped by ``cap``:

        (total**2/4)**t   if total < 2*cap,
        (cap*(total-cap))**t   otherwise.

    The two branches agree at the seam total = 2*cap.
    """
    if theta < 1.0:
        raise ValueError(f"need theta >= 1, got {theta}")
    if not total > 0.0 or not cap > 0.0:
        raise ValueError("need total > 0 and cap > 0")
    if total < 2.0 * cap:
        return (total * total / 4.0) ** theta
    return (cap * (total - cap)) ** theta
