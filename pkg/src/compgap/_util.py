import re

_DIGITS = re.compile(r"(\d+)")


def natural_key(label: str) -> tuple:
    """Sort key that orders ``Cnd 2`` before ``Cnd 10``."""
    return tuple(int(p) if p.isdigit() else p.lower() for p in _DIGITS.split(str(label)))
