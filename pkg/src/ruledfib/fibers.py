"""Multiple fibers of elliptic fibrations S -> P^1 with chi(O_S) = 0.

A fiber is recorded as (m, a, nu, wild): multiplicity, canonical-formula
coefficient, order of O_D(D), wild flag. A configuration adds d = deg L_pi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import gcd, lcm
from typing import Optional, Sequence

from .errors import EmptyInput, MixedMultiplicities, OutOfScope


@dataclass(frozen=True, order=True)
class MultipleFiber:
    m: int
    a: int
    nu: int
    wild: bool

    @classmethod
    def tame(cls, m: int) -> "MultipleFiber":
        return cls(m, m - 1, m, False)

    @property
    def strange(self) -> bool:
        """Wild with a = m - 1."""
        return self.wild and self.a == self.m - 1

    def label(self) -> str:
        return f"{self.a}/{self.m}{'*' if self.wild else ''}"

    def to_json(self):
        return {"m": self.m, "a": self.a, "nu": self.nu, "wild": self.wild}


@dataclass(frozen=True)
class FiberConfig:
    d: int
    fibers: tuple = ()
    p: int = 0
    supersingular: Optional[bool] = None  # reduction type, when known

    def __post_init__(self):
        object.__setattr__(self, "fibers", tuple(sorted(self.fibers)))

    @property
    def h0_T(self) -> int:
        return -self.d

    @property
    def lam(self) -> int:
        return len(self.fibers)

    def to_json(self):
        return {"d": self.d, "p": self.p, "fibers": [f.to_json() for f in self.fibers]}


def _is_power_of(n: int, p: int) -> bool:
    if p < 2:
        return n == 1
    while n % p == 0:
        n //= p
    return n == 1


def validate_config(c: FiberConfig) -> list[str]:
    """Names of violated constraints; empty when the configuration is admissible."""
    bad = []
    for F in c.fibers:
        tag = F.label()
        if F.m < 2:
            bad.append(f"{tag}: multiplicity < 2")
        if not 0 <= F.a <= F.m - 1:
            bad.append(f"{tag}: a outside [0, m-1]")
        if not F.wild and F.a != F.m - 1:
            bad.append(f"{tag}: tame fiber needs a = m-1")
        if F.nu < 1 or F.m % F.nu or not _is_power_of(F.m // F.nu, c.p):
            bad.append(f"{tag}: m is not p^alpha * nu")
        if (F.nu == F.m) == F.wild:
            bad.append(f"{tag}: wild flag disagrees with nu")
        if c.supersingular and c.p and F.wild != (F.m % c.p == 0):
            bad.append(f"{tag}: supersingular reduction is tame iff p does not divide m")
        if F.a + 1 != F.m and F.a + F.nu + 1 != F.m:
            bad.append(f"{tag}: a + 1 != m and a + nu + 1 != m")
    if sum((Fraction(F.a, F.m) for F in c.fibers), Fraction(0)) >= 2 + c.d:
        bad.append("sum a/m >= 2 + d")
    wild = sum(F.wild for F in c.fibers)
    if wild != c.h0_T:
        bad.append(f"{wild} wild fibers but h0(T) = {c.h0_T}")
    if c.p == 0 and wild:
        bad.append("wild fiber in characteristic 0")
    return bad


# --- Katsura-Ueno ------------------------------------------------------------------

@dataclass(frozen=True)
class KUResult:
    feasible: bool
    per_index: tuple  # (index, feasible, witness or None)

    @property
    def witness(self):
        """Witness for the first index (all indices share feasibility when feasible)."""
        return self.per_index[0][2] if self.feasible else None

    def to_json(self):
        return {
            "feasible": self.feasible,
            "per_index": [
                {"index": i, "feasible": ok, "witness": None if w is None else list(w)}
                for i, ok, w in self.per_index
            ],
        }


def _rotate(bits: int, shift: int, L: int, mask: int) -> int:
    shift %= L
    if not shift:
        return bits
    return ((bits << shift) | (bits >> (L - shift))) & mask


def _ku_index(types: Sequence[tuple[int, int]], i: int):
    """Residues n_j mod m_j with n_i = 1 mod nu_i and sum n_j/m_j integral, or None."""
    L = lcm(*(m for m, _ in types))
    mask = (1 << L) - 1
    choices = []
    for j, (m, nu) in enumerate(types):
        if j == i:
            g = gcd(nu, m)
            choices.append([r for r in range(m) if r % g == 1 % g])
        else:
            choices.append(list(range(m)))
    # reach[k]: bitset of sums (mod L, in units of 1/L) of the first k fibers
    reach = [1]
    for (m, _), opts in zip(types, choices):
        step = L // m
        cur = reach[-1]
        nxt = 0
        for r in opts:
            nxt |= _rotate(cur, r * step, L, mask)
        reach.append(nxt)
    if not reach[-1] & 1:
        return None
    target = 0
    witness = []
    for k in range(len(types) - 1, -1, -1):
        m = types[k][0]
        step = L // m
        for r in choices[k]:
            prev = (target - r * step) % L
            if reach[k] >> prev & 1:
                witness.append(r)
                target = prev
                break
    return tuple(reversed(witness))


def ku_feasible(types: Sequence[tuple[int, int]]) -> KUResult:
    """Katsura-Ueno condition, checked once for every distinguished index."""
    types = [(int(m), int(nu)) for m, nu in types]
    if not types:
        raise EmptyInput("no fiber types given")
    for m, nu in types:
        if m < 1 or nu < 1 or nu > m:
            raise ValueError(f"bad type (m={m}, nu={nu})")
    per = []
    for i in range(len(types)):
        w = _ku_index(types, i)
        per.append((i, w is not None, w))
    return KUResult(all(ok for _, ok, _ in per), tuple(per))


# --- enumeration -------------------------------------------------------------------

FAMILIES = ("I", "II", "III", "IV", "V", "VI")


@dataclass
class Enumeration:
    d: int
    p: int
    M: int
    members: list = field(default_factory=list)  # (family, FiberConfig)

    def family(self, name: str) -> list[FiberConfig]:
        return [c for f, c in self.members if f == name]

    def families(self) -> dict:
        out: dict = {}
        for f, c in self.members:
            out.setdefault(f, []).append(c)
        return out

    def to_json(self):
        return {
            "d": self.d,
            "p": self.p,
            "max_m": self.M,
            "families": {
                f: [[F.to_json() for F in c.fibers] for c in cs]
                for f, cs in sorted(self.families().items())
            },
        }


def family_of(c: FiberConfig) -> Optional[str]:
    fs = c.fibers
    if c.d == 0 and not any(F.wild for F in fs):
        ms = [F.m for F in fs]
        if not ms:
            return "I"
        if len(ms) == 2 and ms[0] == ms[1]:
            return "II"
        if ms == [2, 2, 2]:
            return "III"
    if c.d == -1 and c.p > 0:
        if len(fs) == 1 and fs[0].wild and fs[0].nu == 1 and _is_power_of(fs[0].m, c.p):
            if fs[0].a == fs[0].m - 1:
                return "IV"
            if fs[0].a == fs[0].m - 2:
                return "V"
        if c.p == 2 and len(fs) == 2:
            tame = [F for F in fs if not F.wild]
            wild = [F for F in fs if F.wild]
            if tame and wild and tame[0].m == 2 and wild[0].m == 2 and wild[0].a == 0:
                return "VI"
    return None


def _wild_options(m: int, p: int):
    """(a, nu) for a wild fiber of multiplicity m: nu = m / p^alpha, alpha >= 1."""
    out = set()
    q = p
    while q <= m and m % q == 0:
        nu = m // q
        for a in (m - 1, m - nu - 1):
            if 0 <= a <= m - 1:
                out.add((a, nu))
        q *= p
    return sorted(out)


def _accept(c: FiberConfig) -> bool:
    if validate_config(c):
        return False
    if not c.fibers:
        return True
    return ku_feasible([(F.m, F.nu) for F in c.fibers]).feasible


def enumerate_configs(d: int, p: int, M: int) -> Enumeration:
    """All admissible, KU-feasible configurations with multiplicities <= M."""
    if d not in (0, -1):
        raise OutOfScope(f"d = {d}")
    if M < 2:
        raise ValueError("M must be at least 2")
    out = Enumeration(d, p, M)
    if d == 0:
        for lam in range(0, 4):
            for ms in combinations_with_replacement(range(2, M + 1), lam):
                if sum(Fraction(m - 1, m) for m in ms) >= 2:
                    continue
                c = FiberConfig(0, tuple(MultipleFiber.tame(m) for m in ms), p)
                if _accept(c):
                    out.members.append((family_of(c), c))
    elif p > 0:
        for m in range(2, M + 1):
            for a, nu in _wild_options(m, p):
                W = MultipleFiber(m, a, nu, True)
                if Fraction(a, m) >= 1:
                    continue
                cands = [FiberConfig(-1, (W,), p)]
                # a tame fiber contributes at least 1/2, so at most one fits
                for mt in range(2, M + 1):
                    if Fraction(a, m) + Fraction(mt - 1, mt) < 1:
                        cands.append(FiberConfig(-1, (MultipleFiber.tame(mt), W), p))
                for c in cands:
                    if _accept(c):
                        out.members.append((family_of(c), c))
    out.members.sort(key=lambda fc: (FAMILIES.index(fc[0]) if fc[0] in FAMILIES else 99, fc[1].fibers))
    return out


def kodaira_coefficient(c: FiberConfig) -> int:
    """(-2 - d) m + sum a_i, for configurations with a common multiplicity."""
    ms = {F.m for F in c.fibers}
    if len(ms) > 1:
        raise MixedMultiplicities(f"multiplicities {sorted(ms)} differ")
    m = ms.pop() if ms else 1
    return (-2 - c.d) * m + sum(F.a for F in c.fibers)
