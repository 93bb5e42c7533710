"""Characteristic classes of the homogeneous SO(3)-bundles E_n over X_{k,l}."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CharClasses:
    w2: int
    p1: int
    modulus: int

    def to_dict(self) -> dict:
        return {"w2": self.w2, "p1": self.p1, "modulus": self.modulus}


def h4_order(k: int, l: int) -> int:
    """Order of H^4(X_{k,l}; Z), which is cyclic."""
    if k == 0 and l == 0:
        raise ValueError("(k, l) = (0, 0) does not define a circle subgroup")
    return k * k + k * l + l * l


def char_classes(k: int, l: int, n: int) -> CharClasses:
    """w2 = n mod 2 and p1 = n^2 mod (k^2 + kl + l^2)."""
    mod = h4_order(k, l)
    return CharClasses(n % 2, (n * n) % mod, mod)


def weight_bundles(k: int, l: int) -> tuple[int, int, int]:
    """Degrees n1 = k - l, n2 = l - m, n3 = m - k of the bundles carrying irreducible connections."""
    m = -k - l
    return k - l, l - m, m - k


def weight_bundle_classes(k: int, l: int) -> tuple[CharClasses, CharClasses, CharClasses]:
    """Closed forms for the three weight bundles, written without reference to n."""
    mod = h4_order(k, l)
    return (CharClasses((k - l) % 2, (-3 * k * l) % mod, mod),
            CharClasses(k % 2, (-3 * k * k) % mod, mod),
            CharClasses(l % 2, (-3 * l * l) % mod, mod))


def distinguishes(k: int, l: int, n_plus: int, n_minus: int) -> bool:
    """True when E_{n_plus} and E_{n_minus} differ in (w2, p1)."""
    a, b = char_classes(k, l, n_plus), char_classes(k, l, n_minus)
    return (a.w2, a.p1) != (b.w2, b.p1)
