"""Batched tensor kernels."""

import math

import torch
from torch import Tensor


def b_function(a: Tensor, b: Tensor, c: Tensor) -> Tensor:
    """Scaled specular combination for tensors.

    B(a, b, c) = ((a b - c^2) + sqrt((a^2 + c^2)(b^2 + c^2))) / (c (a + b))
    B(a, -a, c) = 0

    Evaluated in the same cancellation-free form as `speckit.eval_B`, with
    arguments sorted first so the result is exactly symmetric.

    Args:
        a (torch.Tensor): First numerators.
        b (torch.Tensor): Second numerators.
        c (torch.Tensor): Positive denominators, broadcastable.

    Returns:
        value (torch.Tensor): Combined values.
    """

    a, b, c = torch.broadcast_tensors(a, b, c)
    hi = torch.max(a, b)
    lo = torch.min(a, b)
    s = hi + lo
    same = ((hi >= 0) == (lo >= 0)) | (hi == 0) | (lo == 0)

    # Scaled to magnitude 1 so the products cannot overflow.
    m = torch.max(torch.max(hi.abs(), lo.abs()), c)
    x, y, z = hi / m, lo / m, c / m
    r_x = torch.hypot(x, z)
    r_y = torch.hypot(y, z)

    direct = (x * r_y + y * r_x) / (r_x + r_y) * (m / c)
    denom = torch.where(same, torch.ones_like(c), x * r_y - y * r_x)
    rational = (s / m / (r_x + r_y)) * ((x - y) / denom) * z

    value = torch.where(same, direct, rational)
    value = torch.min(torch.max(value, lo / c), hi / c)
    value = torch.where(hi == lo, hi / c, value)
    return torch.where(s == 0, torch.zeros_like(value), value)


def a_function(alpha: Tensor, beta: Tensor) -> Tensor:
    """Specular combination of slopes for tensors.

    A(alpha, beta) = tan((arctan(alpha) + arctan(beta)) / 2)

    Args:
        alpha (torch.Tensor): First slopes.
        beta (torch.Tensor): Second slopes.

    Returns:
        value (torch.Tensor): Combined slopes.
    """

    return b_function(alpha, beta, torch.ones_like(alpha))


def b_function_trig(a: Tensor, b: Tensor, c: Tensor) -> Tensor:
    """Trigonometric form of `b_function`."""

    return torch.tan(0.5 * torch.atan2(a, c) + 0.5 * torch.atan2(b, c))


def lp_error(errors: Tensor, h: float, p: float) -> Tensor:
    """Discrete Lp norm of node errors.

    ||e||_p = (h * sum |e_n|^p)^(1/p)
    ||e||_inf = max |e_n|

    Args:
        errors (torch.Tensor): Errors at the nodes, size `(n,)`.
        h (float): Step size.
        p (float): 1, 2 or `math.inf`.

    Returns:
        norm (torch.Tensor): Norm, size `()`.
    """

    errors = errors.abs()
    if p == math.inf:
        return errors.max()
    return (h * errors.pow(p).sum()).pow(1 / p)
