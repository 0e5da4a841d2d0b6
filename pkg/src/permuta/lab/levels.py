"""Definitional checks of local consistency levels on a binary network.

Each check tests the property directly, except that SAC runs AC after each
candidate instantiation and ACPC runs strong path-consistency.
"""

from __future__ import annotations

import enum

from ..core import mask_values
from .enforce import Inconsistent, alldiff_supported, enforce_ac, enforce_pc
from .network import BinaryNetwork


class Level(str, enum.Enum):
    BC = "BC"
    AC = "AC"
    RPC = "RPC"
    PIC = "PIC"
    SAC = "SAC"
    PC = "PC"
    ACPC = "ACPC"
    GAC = "GAC"


def _low(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def is_ac(net: BinaryNetwork) -> bool:
    if not net.nonempty():
        return False
    dom = net.dom
    for (p, q), table in net.rel.items():
        dq = dom[q]
        for a in mask_values(dom[p]):
            if not table.get(a, 0) & dq:
                return False
    return True


def is_bc(net: BinaryNetwork) -> bool:
    """Min and max of every variable extend within each constraint."""
    if not net.nonempty():
        return False
    dom = net.dom
    for (p, q), table in net.rel.items():
        dp = dom[p]
        for a in {_low(dp), dp.bit_length() - 1}:
            if not table.get(a, 0) & dom[q]:
                return False
    for scope in net.nonbinary:
        seen = alldiff_supported(net, scope)
        for k, var in enumerate(scope):
            dv = dom[var]
            for a in (_low(dv), dv.bit_length() - 1):
                if not seen[k] >> a & 1:
                    return False
    return True


def is_gac(net: BinaryNetwork) -> bool:
    if not is_ac(net):
        return False
    for scope in net.nonbinary:
        seen = alldiff_supported(net, scope)
        if any(seen[k] != net.dom[var] for k, var in enumerate(scope)):
            return False
    return True


def is_rpc(net: BinaryNetwork) -> bool:
    """AC, and a value with a single support on some constraint keeps a
    compatible value in every third variable for that pair."""
    if not is_ac(net):
        return False
    nv = len(net)
    for (p, q), table in net.rel.items():
        for a in mask_values(net.dom[p]):
            sup = table.get(a, 0) & net.dom[q]
            if sup & (sup - 1):
                continue
            b = _low(sup)
            for r in range(nv):
                if r != p and r != q and not (net.supports(p, a, r) & net.supports(q, b, r)):
                    return False
    return True


def is_pic(net: BinaryNetwork) -> bool:
    """(1, 2)-consistency: each value extends to any two other variables."""
    if not is_ac(net):
        return False
    nv = len(net)
    for p in range(nv):
        for a in mask_values(net.dom[p]):
            for q in range(nv):
                if q == p:
                    continue
                sq = net.supports(p, a, q)
                for r in range(q + 1, nv):
                    if r == p:
                        continue
                    sr = net.supports(p, a, r)
                    if not any(net.supports(q, b, r) & sr for b in mask_values(sq)):
                        return False
    return True


def is_sac(net: BinaryNetwork) -> bool:
    if not net.nonempty():
        return False
    for p in range(len(net)):
        for a in mask_values(net.dom[p]):
            trial = net.with_domains(net.dom)
            trial.dom[p] = 1 << a
            if not enforce_ac(trial):
                return False
    return True


def is_pc(net: BinaryNetwork) -> bool:
    """Every allowed pair of values extends to every third variable
    (all pairs of variables, unconstrained ones being universal)."""
    if not net.nonempty():
        return False
    nv = len(net)
    for p in range(nv):
        for q in range(p + 1, nv):
            for a in mask_values(net.dom[p]):
                for b in mask_values(net.supports(p, a, q)):
                    for r in range(nv):
                        if r != p and r != q and not (
                                net.supports(p, a, r) & net.supports(q, b, r)):
                            return False
    return True


def is_acpc(net: BinaryNetwork) -> bool:
    """Strong path-consistency as a domain filter: AC holds and enforcing
    PC together with AC removes no domain value.

    Relations may still tighten; :func:`is_pc` is the relation-level check.
    """
    if not is_ac(net):
        return False
    try:
        closed = enforce_pc(net)
    except Inconsistent:
        return False
    return closed.dom == net.dom


_CHECKS = {
    Level.BC: is_bc, Level.AC: is_ac, Level.RPC: is_rpc, Level.PIC: is_pic,
    Level.SAC: is_sac, Level.PC: is_pc, Level.ACPC: is_acpc, Level.GAC: is_gac,
}


def check_level(net: BinaryNetwork, level: Level | str) -> bool:
    """Whether ``net`` has the given consistency property."""
    return _CHECKS[Level(level)](net)
