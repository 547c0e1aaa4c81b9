import re
from fractions import Fraction
from typing import Sequence

# accepted rational spellings: "3", "-3", "3/4", "-3/4", " 3 / 4 "
RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(raw) -> Fraction | None:
    """
    Normalize user-provided rationals into a Fraction.
    Returns the Fraction or None if not parseable.
    Examples:
      '3/4'  -> Fraction(3, 4)
      '-6/8' -> Fraction(-3, 4)
      7      -> Fraction(7, 1)
      '1.5'  -> None (no float literals)
      '1/0'  -> None
    """
    if isinstance(raw, bool):
        return None
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, Fraction):
        return raw
    if not isinstance(raw, str):
        return None

    m = RATIONAL_RE.match(raw)
    if not m:
        return None
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        return None
    return Fraction(int(num), int(den) if den is not None else 1)


def format_rational(q: Fraction | int) -> str:
    """'p/q' in lowest terms, plain integer when the denominator is 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def variable_names(r: int, prefix: str = "t") -> list[str]:
    if r == 1:
        return [prefix]
    return [f"{prefix}{i + 1}" for i in range(r)]


def format_monomial(exponents: Sequence[int], names: Sequence[str] | None = None) -> str:
    """'t1 t2^2' style rendering; the empty monomial renders as ''."""
    names = names or variable_names(len(exponents))
    parts = []
    for name, e in zip(names, exponents):
        if e == 0:
            continue
        parts.append(name if e == 1 else f"{name}^{e}")
    return " ".join(parts)


if __name__ == "__main__":
    # quick interactive tests
    tests = ["3", "-6/8", " 5 / 3 ", "1.5", "1/0", "abc"]
    for t in tests:
        print(f"{t!r} -> {parse_rational(t)}")
    print(format_monomial((1, 2)), "|", format_monomial((0, 3)), "|", format_monomial((4,)))
