"""Display rounding for emitted tables.

Values are first snapped to a few guard digits so binary noise such as
-0.10499999999999998 is treated as the decimal tie -0.105, then rounded with
the requested tie rule.
"""

from __future__ import annotations

from decimal import ROUND_HALF_EVEN, ROUND_HALF_UP, Decimal

ROUNDING_MODES = {"half_away": ROUND_HALF_UP, "half_even": ROUND_HALF_EVEN}
_GUARD_DIGITS = 10


def round_display(x: float, decimals: int = 2, mode: str = "half_away") -> Decimal:
    try:
        rule = ROUNDING_MODES[mode]
    except KeyError:
        raise ValueError(f"rounding mode must be one of {sorted(ROUNDING_MODES)}") from None
    snapped = Decimal(repr(float(x))).quantize(
        Decimal(1).scaleb(-max(_GUARD_DIGITS, decimals + 3)), rounding=ROUND_HALF_EVEN
    )
    out = snapped.quantize(Decimal(1).scaleb(-decimals), rounding=rule)
    return out.copy_abs() if out.is_zero() else out


def fmt(x: float | None, decimals: int = 2, mode: str = "half_away") -> str:
    """Fixed-point text; ``None`` becomes an empty cell."""
    if x is None:
        return ""
    return f"{round_display(x, decimals, mode):f}"


def fmt_p(p: float | None) -> str:
    """p-value as in published ANOVA tables."""
    if p is None:
        return ""
    return "<0.001" if p < 0.001 else fmt(p, 3)
