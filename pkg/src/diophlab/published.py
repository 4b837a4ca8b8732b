"""Published reference data: printed expansions and μ₀ tables, verbatim.

Values are transcribed as printed, including misprints, so that comparisons
can flag them.  Keys are canonical constant keys (``ConstantId.key``).
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PublishedRow:
    row: int          # printed row label
    p: int
    q: int
    printed: str | None  # printed μ₀ text; None for blank cells


EXPANSIONS: dict[str, tuple[int, ...]] = {
    "e+pi": (5, 1, 6, 7, 3, 21, 2, 1, 2, 2, 1, 1, 2, 3, 3, 2, 5, 2, 1, 1, 1, 3, 1, 8),
    "e*pi": (8, 1, 1, 5, 1, 3, 1, 4, 12, 3, 2, 1, 5, 2, 12, 1, 1, 1, 10, 2, 2, 2, 3, 8, 3,
             2, 2, 2, 29, 1),
    "pi+pi^2": (13, 89, 3, 4, 3, 1, 2, 3, 1, 9, 2, 1, 1, 3, 1, 12, 1, 1, 4, 2748, 6, 91, 18,
                19, 2, 12, 1),
}

TABLES: dict[str, tuple[PublishedRow, ...]] = {
    "e+pi": (
        PublishedRow(1, 5, 1, None),
        PublishedRow(2, 6, 1, None),
        PublishedRow(3, 41, 7, "3.033470"),
        PublishedRow(4, 93, 50, "3.153443"),  # printed with a query mark on q
        PublishedRow(5, 920, 157, "2.608509"),
        PublishedRow(6, 19613, 3347, "2.124717"),
        PublishedRow(7, 40146, 6851, "2.382347"),
        PublishedRow(8, 59759, 10198, "2.073126"),
        PublishedRow(9, 379087, 64692, "2.067776"),
        PublishedRow(10, 538751, 91939, "2.066541"),
    ),
    "e*pi": (
        PublishedRow(1, 8, 1, None),
        PublishedRow(2, 9, 1, None),
        PublishedRow(3, 17, 2, "4.653474"),
        PublishedRow(4, 94, 11, "3.153443"),
        PublishedRow(5, 111, 13, "2.599126"),
        PublishedRow(6, 427, 50, "2.104500"),
        PublishedRow(7, 538, 63, "2.382347"),
        PublishedRow(8, 2579, 302, "2.442400"),
        PublishedRow(9, 31486, 3687, "2.150201"),
        PublishedRow(10, 97037, 11363, "2.123550"),
    ),
    "pi+pi^2": (
        PublishedRow(1, 13, 1, None),
        PublishedRow(2, 1158, 89, "2.262270"),
        PublishedRow(3, 3487, 268, "2.273061"),
        PublishedRow(4, 15106, 1161, "2.193714"),
        PublishedRow(5, 48805, 3751, "2.068191"),
        PublishedRow(6, 63911, 4912, "2.130031"),
        PublishedRow(7, 176627, 13575, "2.152449"),
        PublishedRow(8, 593792, 45637, "2.031677"),
        PublishedRow(9, 770419, 59212, "2.211219"),
        PublishedRow(10, 7527563, 578545, "2.073701"),
    ),
}

DECIMAL_PREFIXES: dict[str, str] = {
    "e+pi": "5.859874",
    "e*pi": "8.539734",
    "pi+pi^2": "13.011197",
}

SIN_E_PREFIX = "0.410781"


def lookup(key: str, p: int, q: int) -> PublishedRow | None:
    """Published row aligned with convergent p/q: same q, else same p."""
    rows = TABLES.get(key, ())
    for row in rows:
        if row.q == q and row.p == p:
            return row
    for row in rows:
        if row.q == q or (row.p == p and q > 1):
            return row
    return None
