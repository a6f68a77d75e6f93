r"""Bessel functions :math:`J_n`, :math:`Y_n` and Hankel functions :math:`H^{(1)}_n`.

Integer orders, real nonnegative arguments, vectorized over the argument.

Strategy
--------
* :math:`J_n` for all orders at once by Miller's backward recurrence,
  normalized with :math:`J_0 + 2\sum_k J_{2k} = 1` and rescaled on the fly
  so tiny arguments do not overflow.
* :math:`Y_0, Y_1` from the Neumann series built on the same recurrence,

  .. math::
      Y_0 = \tfrac{2}{\pi}(\ln\tfrac{x}{2} + \gamma) J_0
            - \tfrac{4}{\pi}\sum_{k\ge1} (-1)^k J_{2k}/k,

      Y_1 = -\tfrac{2}{\pi x} J_0 + \tfrac{2}{\pi}(\ln\tfrac{x}{2} + \gamma - 1) J_1
            - \tfrac{2}{\pi}\sum_{k\ge1} (-1)^k \tfrac{2k+1}{k(k+1)} J_{2k+1}.

* Orders 0 and 1 for ``x >= 25`` from the Hankel large-argument expansion,
  which converges below 1e-17 there within ~25 terms.
* :math:`Y_n`, ``n >= 2``, by upward recurrence, which is stable for Y.

Values of :math:`Y_n` overflow to ``-inf`` when ``n`` is large and ``x``
small; that is the true size of the function, not an error.
"""

from __future__ import annotations

import math

import numpy as np

MAX_ORDER = 1000
ASYMPTOTIC_X = 25.0

_EULER_GAMMA = 0.57721566490153286061
_RESCALE_AT = 2.0 ** 664

# argument buckets for the Miller recurrence; each gets its own start order
_MILLER_BUCKETS = (0.0, 2.0, 6.0, 12.0, ASYMPTOTIC_X)


def _check_order(n) -> int:
    if isinstance(n, (bool, np.bool_)) or int(n) != n:
        raise TypeError(f"order must be an integer, got {n!r}")
    n = int(n)
    if n < 0:
        raise ValueError(f"order must be nonnegative, got {n}")
    if n > MAX_ORDER:
        raise ValueError(f"order {n} exceeds the supported maximum {MAX_ORDER}")
    return n


def _start_order(nmax: int, xmax: float) -> int:
    m = max(nmax, xmax)
    start = int(m + 20 + 3 * math.sqrt(10 * m + 1))
    return start + (start % 2)


def _miller(nmax: int, x: np.ndarray):
    """Backward recurrence for ``x > 0`` (1-D).

    Returns ``J`` of shape ``(nmax+1, len(x))`` plus ``Y0`` and ``Y1``.
    """
    start = _start_order(max(nmax, 1), float(x.max()))
    out = np.zeros((nmax + 1, x.size))
    j_next = np.zeros_like(x)          # J_{n+1}
    j_cur = np.full_like(x, 1e-30)     # J_n, unnormalized seed at n = start
    even_sum = np.zeros_like(x)        # sum_{k>=1} J_{2k}
    s0 = np.zeros_like(x)              # sum_{k>=1} (-1)^k J_{2k} / k
    s1 = np.zeros_like(x)              # sum_{k>=1} (-1)^k (2k+1) J_{2k+1} / (k(k+1))
    two_over_x = 2.0 / x
    for n in range(start, 0, -1):
        if n <= nmax:
            out[n] = j_cur
        if n % 2 == 0:
            k = n // 2
            even_sum += j_cur
            s0 += (-1) ** k * j_cur / k
        elif n >= 3:
            k = (n - 1) // 2
            s1 += (-1) ** k * (2 * k + 1) * j_cur / (k * (k + 1))
        j_prev = n * two_over_x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        big = np.abs(j_cur) > _RESCALE_AT
        if big.any():
            f = np.where(big, 1.0 / _RESCALE_AT, 1.0)
            j_cur *= f
            j_next *= f
            even_sum *= f
            s0 *= f
            s1 *= f
            out[n:] *= f
    out[0] = j_cur
    norm = j_cur + 2.0 * even_sum
    out /= norm
    j0, j1 = out[0], (out[1] if nmax >= 1 else j_next / norm)
    log_term = np.log(0.5 * x) + _EULER_GAMMA
    y0 = (2 / np.pi) * (log_term * j0 - 2.0 * s0 / norm)
    y1 = (-(2 / np.pi) * j0 / x + (2 / np.pi) * (log_term - 1.0) * j1
          - (2 / np.pi) * s1 / norm)
    return out, y0, y1


def _hankel_asymptotic(nu: int, x: np.ndarray) -> np.ndarray:
    """Large-argument expansion of H_nu(x); accurate for ``nu <= 1``, ``x >= 25``."""
    mu = 4.0 * nu * nu
    total = np.ones(x.shape, dtype=complex)
    term = np.ones(x.shape, dtype=complex)
    for k in range(1, 60):
        term = term * (1j * (mu - (2 * k - 1) ** 2) / (8.0 * k)) / x
        total += term
        if np.abs(term).max() < 1e-17:
            break
    # exp(i(x - nu*pi/2 - pi/4)) with the constant phase kept exact
    phase = np.exp(1j * x) * np.exp(-1j * np.pi * (0.5 * nu + 0.25))
    return np.sqrt(2.0 / (np.pi * x)) * phase * total


def _jy_table(nmax: int, x: np.ndarray, need_j: bool = True):
    """J_0..J_nmax and Y_0..Y_nmax for a flat array ``x >= 0``."""
    j = np.zeros((nmax + 1, x.size))
    y0 = np.empty(x.size)
    y1 = np.empty(x.size)

    zero = x == 0
    j[0, zero] = 1.0
    y0[zero] = -np.inf
    y1[zero] = -np.inf

    far = x >= ASYMPTOTIC_X
    if far.any():
        h0 = _hankel_asymptotic(0, x[far])
        h1 = _hankel_asymptotic(1, x[far])
        y0[far], y1[far] = h0.imag, h1.imag
        if nmax <= 1:
            j[0, far] = h0.real
            if nmax == 1:
                j[1, far] = h1.real
        elif need_j:
            j[:, far] = _miller(nmax, x[far])[0]

    edges = _MILLER_BUCKETS
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (x > lo) & (x < hi) if lo == 0.0 else (x >= lo) & (x < hi)
        if sel.any():
            jj, yy0, yy1 = _miller(nmax, x[sel])
            j[:, sel] = jj
            y0[sel], y1[sel] = yy0, yy1

    y = np.empty((nmax + 1, x.size))
    y[0] = y0
    if nmax >= 1:
        y[1] = y1
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for n in range(1, nmax):
            y[n + 1] = (2.0 * n / x) * y[n] - y[n - 1]
    if nmax >= 2:
        y[2:, zero] = -np.inf
    return j, y


def _prepare(x, strict: bool):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise ValueError("argument is NaN")
    if strict and np.any(arr <= 0):
        raise ValueError("argument must be positive (logarithmic singularity at 0)")
    if np.any(arr < 0):
        raise ValueError("argument must be nonnegative")
    return arr


def _finish(values: np.ndarray, shape):
    return values.reshape(shape) if shape else values.reshape(()).item()


def bessel_j(n: int, x):
    """Bessel function of the first kind J_n(x), ``x >= 0``."""
    n = _check_order(n)
    arr = _prepare(x, strict=False)
    j, _ = _jy_table(n, arr.ravel())
    return _finish(j[n], arr.shape)


def bessel_y(n: int, x):
    """Bessel function of the second kind Y_n(x), ``x > 0``."""
    n = _check_order(n)
    arr = _prepare(x, strict=True)
    _, y = _jy_table(n, arr.ravel(), need_j=False)
    return _finish(y[n], arr.shape)


def hankel1(n: int, x):
    """Hankel function of the first kind, ``J_n(x) + i Y_n(x)``, ``x > 0``."""
    n = _check_order(n)
    arr = _prepare(x, strict=True)
    j, y = _jy_table(n, arr.ravel())
    return _finish(j[n] + 1j * y[n], arr.shape)


def hankel1_orders(nmax: int, x) -> np.ndarray:
    """H_0(x), ..., H_nmax(x) stacked along a new leading axis."""
    nmax = _check_order(nmax)
    arr = _prepare(x, strict=True)
    j, y = _jy_table(nmax, arr.ravel())
    return (j + 1j * y).reshape((nmax + 1,) + arr.shape)


def hankel1_01(x) -> tuple[np.ndarray, np.ndarray]:
    """H_0(x) and H_1(x) together; the fast path used by the charge columns."""
    arr = _prepare(x, strict=True)
    j, y = _jy_table(1, arr.ravel())
    h = j + 1j * y
    return h[0].reshape(arr.shape), h[1].reshape(arr.shape)
