"""Offset schedules for one-sided difference quotients."""

from typing import Iterator


class DiffSchedule:
    """Geometric offset schedule `h0 * shrink ** k` realising `h -> 0+`.

    Iterating over a schedule yields the offsets of every level, largest
    first, in the same manner as an annealer yields its values.

    Args:
        h0 (float, optional): Initial offset.
        shrink (float, optional): Ratio between successive offsets, in
            `(0, 1)`.
        max_levels (int, optional): Number of levels, at least 2.
        conv_tol (float, optional): Tolerance on successive extrapolated
            quotients.
        inf_threshold (float, optional): Magnitude beyond which quotients are
            candidates for an infinite one-sided derivative.
        extrapolation_depth (int, optional): Number of Richardson columns
            applied to the raw quotients (0 disables extrapolation).

    Raises:
        ValueError: If any parameter is out of range, or the last offset
            underflows to zero.
    """

    def __init__(self, h0: float = 1e-2, shrink: float = 0.5,
                 max_levels: int = 30, conv_tol: float = 1e-8,
                 inf_threshold: float = 1e8, extrapolation_depth: int = 3
                 ) -> None:

        if not h0 > 0:
            raise ValueError(f"Initial offset must be positive, but given "
                             f"h0={h0}")
        if not 0 < shrink < 1:
            raise ValueError(f"Shrink ratio must be in (0, 1), but given "
                             f"shrink={shrink}")
        if max_levels < 2:
            raise ValueError(f"At least two levels are required, but given "
                             f"max_levels={max_levels}")
        if not conv_tol > 0:
            raise ValueError(f"Tolerance must be positive, but given "
                             f"conv_tol={conv_tol}")
        if not inf_threshold > 0:
            raise ValueError(f"Threshold must be positive, but given "
                             f"inf_threshold={inf_threshold}")
        if extrapolation_depth < 0:
            raise ValueError(
                "Extrapolation depth must be non-negative, but given "
                f"extrapolation_depth={extrapolation_depth}")
        if not h0 * shrink ** (max_levels - 1) > 0:
            raise ValueError(f"Last offset underflows: h0={h0}, "
                             f"shrink={shrink}, max_levels={max_levels}")

        self.h0 = h0
        self.shrink = shrink
        self.max_levels = max_levels
        self.conv_tol = conv_tol
        self.inf_threshold = inf_threshold
        self.extrapolation_depth = extrapolation_depth

    def __iter__(self) -> Iterator[float]:
        for k in range(self.max_levels):
            yield self.h0 * self.shrink ** k

    def __len__(self) -> int:
        return self.max_levels

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiffSchedule):
            return NotImplemented
        return vars(self) == vars(other)

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v!r}" for k, v in vars(self).items())
        return f"DiffSchedule({params})"

    def replace(self, **kwargs) -> "DiffSchedule":
        """Returns a copy with the given parameters replaced.

        Args:
            kwargs: Constructor parameters to override.

        Returns:
            schedule (DiffSchedule): New schedule.
        """

        params = dict(vars(self))
        params.update(kwargs)
        return DiffSchedule(**params)

    def nested(self) -> "DiffSchedule":
        """Schedule for differentiating an already estimated derivative.

        Nested finite differences amplify the noise of the inner estimates, so
        the outer differentiation starts closer and stops earlier.

        Returns:
            schedule (DiffSchedule): Schedule with `h0=1e-3`,
                `conv_tol=1e-5`.
        """

        return self.replace(h0=1e-3, conv_tol=1e-5)
