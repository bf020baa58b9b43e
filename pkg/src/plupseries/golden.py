"""Reference values of a_k^(n) (R series on cycles) and b_k^[n] (S series in q on chains).

Entries are kept as displayed strings. ``"3+1/3"`` and integer strings are
exact; decimal strings are matched by :func:`matches_display`.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction

R_DISPLAY = {
    3: "0 1 2 3+1/3 5.00 7.00 9.33 12.00 15.00 18.33 22.00 26.00 30.33 35.00 40.00 45.333 51.000 57.000",
    4: "0 1 2 3+2/3 6.16 9.66 14.3 20.33 27.83 37.00 48.00 61.00 76.16 93.66 113.6 136.33 161.83 190.33",
    5: "0 1 2 3+2/3 6.44 10.8 17.3 26.65 39.43 56.48 78.65 106.9 142.2 185.8 238.7 302.41 378.05 467.13",
    6: "0 1 2 3+2/3 6.44 11.0 18.5 30.02 47.10 71.68 106.0 152.9 215.4 297.4 403.1 537.21 705.25 913.31",
    7: "0 1 2 3+2/3 6.44 11.0 18.7 31.21 50.83 80.80 125.3 189.7 280.8 407.0 578.6 808.13 1110.2 1502.6",
    8: "0 1 2 3+2/3 6.44 11.0 18.7 31.44 52.08 84.95 136.0 213.6 328.9 496.5 735.6 1070.7 1532.5 2159.5",
    9: "0 1 2 3+2/3 6.44 11.0 18.7 31.44 52.30 86.27 140.7 226.3 358.4 558.4 855.4 1289.0 1911.5 2791.4",
    10: "0 1 2 3+2/3 6.44 11.0 18.7 31.44 52.30 86.49 142.1 231.6 373.4 594.8 934.4 1447.1 2209.0 3324.6",
    18: "0 1 2 3+2/3 6.44 11.08 18.76 31.45 52.31 86.49 142.33 233.31 381.17 621.02 1009.38 1637.13 2650.56 4284.31",
}

S_DISPLAY = {
    3: "1 0 -2 -2 0 4 6 2 -8 -16 -10 14 40 36 -18 -94",
    4: "1 0 -2 -4 -3.50 5.75 22.25 31.31 1.91 -89.13 -200.21 -171.80 220.35 992.97 1513.93 352.89",
    5: "1 0 -2 -4 -8.25 -2.46 23.94 76.89 127.93 50.05 -357.65 -1208.56 -2034.75 -1004.08 5178.29 18688.02",
    6: "1 0 -2 -4 -8.25 -13.65 2.11 76.61 239.51 422.23 325.17 -860.92 -4423.36 -10847.19 -15746.83 -2393.70",
    7: "1 0 -2 -4 -8.25 -13.65 -24.58 19.20 221.39 689.37 1325.77 1325.82 -1515.32 -12291.20 -38583.12 -81814.55",
    8: "1 0 -2 -4 -8.25 -13.65 -24.58 -44.71 69.28 599.01 1939.94 3969.88 4778.48 -1873.44 -30668.24 -112066.49",
    9: "1 0 -2 -4 -8.25 -13.65 -24.58 -44.71 -84.21 196.95 1590.70 5328.67 11662.68 15977.89 1408.10 -75058.95",
    10: "1 0 -2 -4 -8.25 -13.65 -24.58 -44.71 -84.21 -172.29 531.63 4131.50 14490.20 33615.60 51447.00 22246.40",
}

# displayed entries that neither round nor truncate the exact value (see README)
KNOWN_MISPRINTS = {("R", 18, 14), ("R", 18, 15)}


def displayed(quantity: str, n: int) -> list[str]:
    table = R_DISPLAY if quantity == "R" else S_DISPLAY
    return table[n].split()


def parse_exact(text: str) -> Fraction | None:
    """Exact value of an integer or ``a+b/c`` entry, None for a decimal display."""
    if "." in text:
        return None
    if "+" in text:
        whole, frac = text.split("+")
        return Fraction(int(whole)) + Fraction(frac)
    return Fraction(int(text))


def matches_display(value: Fraction, text: str) -> bool:
    """Exact entries must be equal; decimals may be rounded or truncated at the shown precision.

    Trailing zeros may be padding, so the shorter precision is accepted too.
    """
    exact = parse_exact(text)
    if exact is not None:
        return value == exact
    shown = Fraction(Decimal(text))
    digits = text.split(".")[1]
    for places in {len(digits), len(digits.rstrip("0"))}:
        unit = Fraction(1, 10 ** places)
        if abs(value - shown) <= unit / 2:
            return True
        # truncation toward zero
        diff = value - shown
        if (0 <= diff < unit) if shown >= 0 else (-unit < diff <= 0):
            return True
    return False


def golden_cells(quantity: str, sizes, max_k: int):
    """(n, k, display) for the requested block of a table."""
    for n in sizes:
        for k, text in enumerate(displayed(quantity, n)[: max_k + 1]):
            yield n, k, text
