"""Switching patterns: validation, classification and application.

Every switching is described by a cyclic vertex sequence ``v0..v{k-1}`` with a
constraint on each consecutive pair ``(v_j, v_{j+1})``.  A constraint is a
bit mask over the four pair states below.  Apart from one permitted
coincidence per pattern, all vertices are distinct.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import InvalidMove
from .graph_core import ColoredState, canon

# pair states, as bits
BN, BE, RN, RE = 1, 2, 4, 8
E = BE | RE
N = BN | RN
R = RN | RE


def state_bit(state: ColoredState, u: int, v: int) -> int:
    edge = v in state.adj[u]
    if v in state.instance.red_adj[u]:
        return RE if edge else RN
    return BE if edge else BN


@dataclass(frozen=True)
class Pattern:
    name: str
    cons: tuple
    allow: tuple = ()

    @property
    def k(self) -> int:
        return len(self.cons)

    def relabel(self, perm) -> "Pattern":
        """Pattern satisfied by ``u`` iff this one is satisfied by ``u[perm]``."""
        k = self.k
        cons = [0] * k
        for j in range(k):
            a, b = perm[j], perm[(j + 1) % k]
            if (a + 1) % k == b:
                cons[a] = self.cons[j]
            elif (b + 1) % k == a:
                cons[b] = self.cons[j]
            else:
                raise ValueError("relabelling must map the cycle to itself")
        allow = tuple(tuple(sorted((perm[a], perm[b]))) for a, b in self.allow)
        return Pattern(self.name, tuple(cons), allow)


def matches(state: ColoredState, pattern: Pattern, v) -> bool:
    k = pattern.k
    if len(v) != k:
        return False
    n = state.n
    for x in v:
        if not 0 <= x < n:
            return False
    allow = pattern.allow
    for a in range(k):
        for b in range(a + 1, k):
            if v[a] == v[b] and (a, b) not in allow:
                return False
    for j in range(k):
        a, b = v[j], v[(j + 1) % k]
        if a == b or not state_bit(state, a, b) & pattern.cons[j]:
            return False
    return True


# relabelling between the "+" and "-" vertex labellings of an octagon
MINUS = (1, 0, 7, 6, 5, 4, 3, 2)


def to_plus(v, orientation: str):
    if orientation == "+":
        return tuple(v)
    return tuple(v[p] for p in MINUS)


_T2_7 = ((2, 7),)

THREE_FWD = Pattern("3edge", (RE, BN, BE, BN, BE, BN), ((2, 5),))
THREE_INV = Pattern("3edge-inv", (RN, BE, BN, BE, BN, BE), ((2, 5),))

TYPE_I_CLASS = {
    "A": Pattern("I:A", (RE, BN, BE, BN, BE, BN, BE, BN), _T2_7),
    "B1+": Pattern("I:B1+", (RE, RN, BE, BN, BE, BN, BE, BN), _T2_7),
    "B1-": Pattern("I:B1-", (RE, BN, BE, BN, BE, BN, BE, RN), _T2_7),
    "B2+": Pattern("I:B2+", (RE, BN, RE, BN, BE, BN, BE, BN), _T2_7),
    "B2-": Pattern("I:B2-", (RE, BN, BE, BN, BE, BN, RE, BN), _T2_7),
    "C+": Pattern("I:C+", (RE, RN, RE, BN, BE, BN, BE, BN), _T2_7),
    "C-": Pattern("I:C-", (RE, BN, BE, BN, BE, BN, RE, RN), _T2_7),
}

IIA = Pattern("IIa", (RE, RN, BE, BN, BE, BN, BE, RN), _T2_7)
III = Pattern("III", (RN, RN, BE, BN, BE, BN, BE, RN), _T2_7)
IIB_CTX = Pattern("IIb-ctx", (RN, RN, BN, BE, BN, BE, BN, BE), _T2_7)
IIC_CTX = Pattern("IIc-ctx", (RN, RN, BN, BE, BN, BE, BN, RN), _T2_7)

# octagons left behind by class B1 moves, keyed by variant
B1_VARIANT = {
    "I": Pattern("B1:I", (RN, RE, BN, BE, BN, BE, BN, BE), _T2_7),
    "IIa": Pattern("B1:IIa", (RN, RE, BN, BE, BN, BE, BN, RE), _T2_7),
    "IIb": Pattern("B1:IIb", (RE, RE, BN, BE, BN, BE, BN, BE), _T2_7),
    "IIc": Pattern("B1:IIc", (RE, RE, BN, BE, BN, BE, BN, RE), _T2_7),
}
B1_COMMON = Pattern("B1", (R, RE, BN, BE, BN, BE, BN, E), _T2_7)

INV_A = Pattern("inv:A", (RN, BE, BN, BE, BN, BE, BN, BE), _T2_7)
INV_B2 = Pattern("inv:B2", (RN, BE, RN, BE, BN, BE, BN, BE), _T2_7)
INV_C = Pattern("inv:C", (RN, RE, RN, BE, BN, BE, BN, BE), _T2_7)

# gadget on an octagon pair (a, b), as the 6-cycle (a, y1, y2, y4, y3, b)
GADGET_FWD = Pattern("gadget", (BE, BN, BE, BN, BE, RN))
GADGET_INV = Pattern("gadget-inv", (BN, BE, BN, BE, BN, RE))

# octagon pairs that receive a gadget, per booster type
GADGET_PAIRS = {"IIb": ((0, 1), (1, 2)), "IIc": ((0, 1), (1, 2), (0, 7))}

TYPES = ("I", "IIa+", "IIa-", "IIb+", "IIb-", "IIc+", "IIc-", "III+", "III-")
CLASSES = ("A", "B1+", "B1-", "B2+", "B2-", "C+", "C-")
TYPE_CLASSES = {
    "I": CLASSES,
    "IIa+": ("B1+",), "IIa-": ("B1-",),
    "IIb+": ("B1+",), "IIb-": ("B1-",),
    "IIc+": ("B1+",), "IIc-": ("B1-",),
    "III+": ("C+",), "III-": ("C-",),
}
# stratum change of a forward move
CLASS_SHIFT = {"A": -1, "B1+": 0, "B1-": 0, "B2+": -2, "B2-": -2, "C+": -1, "C-": -1}
TYPE_SHIFT = {"IIa": 1, "IIb": 2, "IIc": 3, "III": 0}


def base_type(tau: str) -> str:
    return tau.rstrip("+-")


def orientation_of(tau: str) -> str:
    return "-" if tau.endswith("-") else "+"


@dataclass(frozen=True)
class SwitchMove:
    type: str
    v: tuple
    cls: str
    source: int
    target: int
    gadget: tuple = ()

    def octagon_plus(self) -> tuple:
        if self.type == "I":
            return tuple(self.v)
        return to_plus(self.v, orientation_of(self.type))


# ----- 3-edge switching -------------------------------------------------------

def validate_3edge(state: ColoredState, v) -> bool:
    return matches(state, THREE_FWD, tuple(v))


def toggles_3edge(v):
    v0, v1, v2, v3, v4, v5 = v
    return ((v0, v1), (v2, v3), (v4, v5)), ((v1, v2), (v3, v4), (v0, v5))


def apply_3edge(state: ColoredState, v, check: bool = True) -> ColoredState:
    """Perform a 3-edge switching in place; returns the state."""
    if check and not validate_3edge(state, v):
        raise InvalidMove(f"invalid 3-edge tuple {tuple(v)}")
    rem, add = toggles_3edge(v)
    state.toggle(rem, add)
    return state


# ----- Type I ---------------------------------------------------------------

def _octagon_basic(state: ColoredState, v) -> bool:
    if len(v) != 8 or any(not 0 <= x < state.n for x in v):
        return False
    for a in range(8):
        for b in range(a + 1, 8):
            if v[a] == v[b] and (a, b) != (2, 7):
                return False
    return True


def classify_typeI(state: ColoredState, v) -> Optional[str]:
    v = tuple(v)
    if not _octagon_basic(state, v):
        return None
    st = [state_bit(state, v[j], v[(j + 1) % 8]) for j in range(8)]
    if st[0] != RE or st[3] != BN or st[4] != BE or st[5] != BN:
        return None
    if not (st[2] & E and st[6] & E and st[1] & N and st[7] & N):
        return None
    red12, red23, red67, red70 = st[1] == RN, st[2] == RE, st[6] == RE, st[7] == RN
    combo = (red12, red23, red70, red67)
    return _COMBO.get(combo)


_COMBO = {
    (False, False, False, False): "A",
    (True, False, False, False): "B1+",
    (False, False, True, False): "B1-",
    (False, True, False, False): "B2+",
    (False, False, False, True): "B2-",
    (True, True, False, False): "C+",
    (False, False, True, True): "C-",
}


def validate_typeI(state: ColoredState, v) -> Optional[str]:
    """Class of a valid Type I octagon, or ``None``."""
    return classify_typeI(state, v)


def octagon_toggles(v):
    v0, v1, v2, v3, v4, v5, v6, v7 = v
    return ((v0, v1), (v2, v3), (v4, v5), (v6, v7)), ((v0, v7), (v1, v2), (v3, v4), (v5, v6))


def apply_typeI(state: ColoredState, v, check: bool = True) -> ColoredState:
    if check and classify_typeI(state, v) is None:
        raise InvalidMove(f"invalid Type I tuple {tuple(v)}")
    rem, add = octagon_toggles(v)
    state.toggle(rem, add)
    return state


# ----- boosters ---------------------------------------------------------------

def validate_IIa(state: ColoredState, v, orientation: str = "+") -> bool:
    return matches(state, IIA, to_plus(v, orientation))


def apply_IIa(state: ColoredState, v, orientation: str = "+", check: bool = True) -> ColoredState:
    if check and not validate_IIa(state, v, orientation):
        raise InvalidMove("invalid IIa tuple")
    rem, add = octagon_toggles(to_plus(v, orientation))
    state.toggle(rem, add)
    return state


def validate_III(state: ColoredState, v, orientation: str = "+") -> bool:
    return matches(state, III, to_plus(v, orientation))


def apply_III(state: ColoredState, v, orientation: str = "+", check: bool = True) -> ColoredState:
    if check and not validate_III(state, v, orientation):
        raise InvalidMove("invalid III tuple")
    return state


def gadget_cycle(a: int, b: int, y) -> tuple:
    y1, y2, y3, y4 = y
    return (a, y1, y2, y4, y3, b)


def gadget_toggles(a: int, b: int, y):
    y1, y2, y3, y4 = y
    return ((a, y1), (y2, y4), (y3, b)), ((y1, y2), (y4, y3), (a, b))


def _gadget_groups(kind: str, w, y):
    pairs = GADGET_PAIRS[kind]
    if len(y) != 4 * len(pairs):
        return None
    return [(w[a], w[b], tuple(y[4 * g: 4 * g + 4])) for g, (a, b) in enumerate(pairs)]


def _validate_gadgets(state: ColoredState, kind: str, w, y, inverse: bool = False) -> bool:
    groups = _gadget_groups(kind, w, y)
    if groups is None:
        return False
    used = set(w)
    ys = list(y)
    if len(set(ys)) != len(ys) or used & set(ys):
        return False
    pat = GADGET_INV if inverse else GADGET_FWD
    return all(matches(state, pat, gadget_cycle(a, b, g)) for a, b, g in groups)


def validate_IIb(state: ColoredState, v, y, orientation: str = "+") -> bool:
    w = to_plus(v, orientation)
    return matches(state, IIB_CTX, w) and _validate_gadgets(state, "IIb", w, y)


def validate_IIc(state: ColoredState, v, y, orientation: str = "+") -> bool:
    w = to_plus(v, orientation)
    return matches(state, IIC_CTX, w) and _validate_gadgets(state, "IIc", w, y)


def booster_toggles(kind: str, w, y):
    rem, add = [], []
    for a, b, g in _gadget_groups(kind, w, y):
        r, s = gadget_toggles(a, b, g)
        rem.extend(r)
        add.extend(s)
    return rem, add


def apply_IIb(state: ColoredState, v, y, orientation: str = "+", check: bool = True) -> ColoredState:
    if check and not validate_IIb(state, v, y, orientation):
        raise InvalidMove("invalid IIb tuple")
    rem, add = booster_toggles("IIb", to_plus(v, orientation), y)
    state.toggle(rem, add)
    return state


def apply_IIc(state: ColoredState, v, y, orientation: str = "+", check: bool = True) -> ColoredState:
    if check and not validate_IIc(state, v, y, orientation):
        raise InvalidMove("invalid IIc tuple")
    rem, add = booster_toggles("IIc", to_plus(v, orientation), y)
    state.toggle(rem, add)
    return state


def b1_octagon_variant(state: ColoredState, v, orientation: str = "+") -> Optional[str]:
    w = to_plus(v, orientation)
    if not matches(state, B1_COMMON, w):
        return None
    present = w[1] in state.adj[w[0]]
    red70 = state.instance.is_red(w[0], w[7])
    return {(False, False): "I", (False, True): "IIa", (True, False): "IIb", (True, True): "IIc"}[(present, red70)]


# ----- moves ---------------------------------------------------------------

def move_toggles(move: SwitchMove):
    t = base_type(move.type)
    if move.type == "3edge":
        return toggles_3edge(move.v)
    if t == "I":
        return octagon_toggles(move.v)
    w = move.octagon_plus()
    if t == "IIa":
        return octagon_toggles(w)
    if t in ("IIb", "IIc"):
        return booster_toggles(t, w, move.gadget)
    return (), ()


def apply_move(state: ColoredState, move: SwitchMove) -> ColoredState:
    rem, add = move_toggles(move)
    if rem or add:
        state.toggle(rem, add)
    return state


def is_valid_move(state: ColoredState, move: SwitchMove) -> bool:
    t = base_type(move.type)
    o = orientation_of(move.type)
    if move.type == "3edge":
        return validate_3edge(state, move.v)
    if t == "I":
        return classify_typeI(state, move.v) == move.cls
    if t == "IIa":
        return validate_IIa(state, move.v, o)
    if t == "IIb":
        return validate_IIb(state, move.v, move.gadget, o)
    if t == "IIc":
        return validate_IIc(state, move.v, move.gadget, o)
    if t == "III":
        return validate_III(state, move.v, o)
    return False


def make_move(state: ColoredState, tau: str, v, gadget=()) -> Optional[SwitchMove]:
    """Validate a proposed tuple and wrap it as a move, or return ``None``."""
    i = state.stratum
    v = tuple(v)
    if tau == "3edge":
        return SwitchMove("3edge", v, "easy", i, i - 1) if validate_3edge(state, v) else None
    if tau == "I":
        cls = classify_typeI(state, v)
        return None if cls is None else SwitchMove("I", v, cls, i, i + CLASS_SHIFT[cls])
    t, o = base_type(tau), orientation_of(tau)
    cls = ("C" if t == "III" else "B1") + o
    mv = SwitchMove(tau, v, cls, i, i + TYPE_SHIFT[t], tuple(gadget))
    return mv if is_valid_move(state, mv) else None


def pair_key(u: int, v: int):
    return canon(u, v)
