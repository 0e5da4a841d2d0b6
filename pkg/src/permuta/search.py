"""Chronological backtracking with FC, MAC and MGAC propagation.

Two branching schemes are available.  Binary branching (the default) posts
``x = v`` and, on backtrack, ``x != v``; d-way branching tries each value of
the chosen variable in turn.  ``fails`` counts decisions whose propagation
wipes out; ``nodes`` counts decisions on variables with at least two values
left.
"""

from __future__ import annotations

import enum
import sys
import time
from dataclasses import dataclass, field

from .core import Block, Problem, VarRef, satisfied
from .engine import Engine
from .propagate import DomainStore


class Algorithm(str, enum.Enum):
    FC = "fc"
    MAC = "mac"
    MGAC = "mgac"
    AUTO = "auto"


class Heuristic(str, enum.Enum):
    LEX = "lex"
    SD_P = "sd_p"
    SD_D = "sd_d"
    SD_PD = "sd_pd"
    SD2_P = "sd2_p"
    SD2_D = "sd2_d"
    SD2_PD = "sd2_pd"

    @property
    def blocks(self) -> tuple[Block, ...]:
        if self is Heuristic.LEX:
            return (Block.PRIMAL,)
        tail = self.value.split("_")[1]
        return {"p": (Block.PRIMAL,), "d": (Block.DUAL,),
                "pd": (Block.PRIMAL, Block.DUAL)}[tail]

    @property
    def dynamic(self) -> bool:
        return self is not Heuristic.LEX

    @property
    def promise(self) -> bool:
        return self.value.startswith("sd2")


class Goal(str, enum.Enum):
    FIRST = "first"
    ALL = "all"


@dataclass(frozen=True)
class SearchConfig:
    algorithm: Algorithm = Algorithm.AUTO
    heuristic: Heuristic = Heuristic.LEX
    goal: Goal = Goal.FIRST
    fail_first_singletons: bool = True
    time_limit: float | None = None
    branching: str = "binary"
    # FC only: removing j from x_i also removes i from its channelled dual
    channel_views: bool = False

    def resolve(self, problem: Problem) -> Algorithm:
        if self.algorithm is not Algorithm.AUTO:
            return self.algorithm
        model = problem.model
        if model is not None and model.has_alldiff:
            return Algorithm.MGAC
        return Algorithm.MAC


@dataclass
class SearchStats:
    fails: int = 0
    nodes: int = 0
    solutions: int = 0
    elapsed: float = 0.0
    aborted: bool = False

    @property
    def time_ms(self) -> float:
        return self.elapsed * 1000.0


class Trail:
    """Stack of decisions over an engine's restoration trail."""

    def __init__(self, engine: Engine):
        self.engine = engine
        self.stack: list[tuple[int, int, int]] = []

    def push(self, var: int, value: int) -> None:
        self.stack.append((var, value, self.engine.mark()))

    def pop(self) -> tuple[int, int]:
        var, value, mark = self.stack.pop()
        self.engine.undo(mark)
        return var, value

    def __len__(self) -> int:
        return len(self.stack)


class _Abort(Exception):
    pass


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def select_variable(store: DomainStore, config: SearchConfig,
                    assigned: set[VarRef] | None = None) -> VarRef | None:
    """Next branching variable, or None when every candidate is bound.

    Without ``assigned``, a variable is bound once its domain is a singleton.
    """
    def unbound(v: VarRef) -> bool:
        if assigned is not None:
            return v not in assigned
        return len(store[v]) > 1

    variables = list(store)
    if config.fail_first_singletons and assigned is not None:
        for v in variables:
            if unbound(v) and len(store[v]) == 1:
                return v
    blocks = config.heuristic.blocks
    cands = [v for v in variables if v.block in blocks and unbound(v)]
    if not cands:
        cands = [v for v in variables if v.block == Block.PRIMAL and unbound(v)]
    if not cands:
        return None
    if not config.heuristic.dynamic:
        return cands[0]
    return min(cands, key=lambda v: (len(store[v]), v.block, v.index))


def select_value_order(store: DomainStore, var: VarRef, config: SearchConfig,
                       n: int | None = None) -> list[int]:
    """Values of ``var`` in the order they are tried."""
    values = list(store[var])
    if not config.heuristic.promise:
        return values
    other = Block.DUAL if var.block == Block.PRIMAL else Block.PRIMAL

    def key(v: int):
        partner = VarRef(other, v)
        if partner not in store or (n is not None and v > n and other == Block.PRIMAL):
            return (1, 0, v)
        return (0, len(store[partner]), v)

    return sorted(values, key=key)


class Solver:
    def __init__(self, problem: Problem, config: SearchConfig):
        self.problem = problem
        self.config = config
        h = config.heuristic
        if (Block.DUAL in h.blocks or h.promise) and not problem.dual:
            raise ValueError(f"heuristic {h.value} needs a dual block")
        self.algorithm = config.resolve(problem)
        mode = "gac" if self.algorithm is Algorithm.MGAC else "decompose"
        self.eng = Engine(problem, alldiff=mode)
        self.eng.channel_views = config.channel_views and self.algorithm is Algorithm.FC
        self.stats = SearchStats()
        self.solutions: list[dict[VarRef, int]] = []
        eng = self.eng
        self.primal = [k for k, v in enumerate(eng.vars) if v.block == Block.PRIMAL]
        blocks = config.heuristic.blocks
        self.cands = [k for k, v in enumerate(eng.vars) if v.block in blocks]
        self.rest = [k for k, v in enumerate(eng.vars) if v.block != Block.PRIMAL]
        self.assigned = [False] * len(eng.vars)
        # value -> channel partner variables, for promise value ordering
        self.partners: list[dict[int, list[int]]] = []
        for k in range(len(eng.vars)):
            table: dict[int, list[int]] = {}
            for val, lst in eng.chan[k].items():
                table[val] = [w for w, _ in lst]
            self.partners.append(table)
        self.deadline = None
        self.ticks = 0
        # optional log of counted decisions: (depth, variable, value)
        self.decisions: list[tuple[int, VarRef, int]] | None = None
        self.depth = 0
        self.trail = Trail(eng)

    # -- helpers --------------------------------------------------------

    def _check_time(self) -> None:
        self.ticks += 1
        if self.deadline is not None and not self.ticks & 63:
            if time.perf_counter() > self.deadline:
                raise _Abort

    def _unbound(self, k: int) -> bool:
        if self.algorithm is Algorithm.FC:
            return not self.assigned[k]
        dm = self.eng.dom[k]
        return bool(dm & (dm - 1))

    def _pick(self) -> int | None:
        dom = self.eng.dom
        heur = self.config.heuristic
        if self.algorithm is Algorithm.FC:
            assigned = self.assigned
            if self.config.fail_first_singletons:
                for k in range(len(dom)):
                    if not assigned[k] and not dom[k] & (dom[k] - 1):
                        return k
            best = None
            best_key = None
            for k in self.cands:
                if assigned[k]:
                    continue
                if not heur.dynamic:
                    return k
                key = _popcount(dom[k])
                if best is None or key < best_key:
                    best, best_key = k, key
            if best is None:
                for k in self.primal:
                    if not assigned[k]:
                        return k
            return best
        best = None
        best_key = 1 << 60
        dynamic = heur.dynamic
        for k in self.cands:
            dm = dom[k]
            if dm & (dm - 1):
                if not dynamic:
                    return k
                key = _popcount(dm)
                if key < best_key:
                    best, best_key = k, key
                    if key == 2:
                        break
        if best is None:
            for k in self.primal:
                dm = dom[k]
                if dm & (dm - 1):
                    return k
        return best

    def _values(self, k: int) -> list[int]:
        dm = self.eng.dom[k]
        values = []
        while dm:
            low = dm & -dm
            values.append(low.bit_length() - 1)
            dm ^= low
        if not self.config.heuristic.promise:
            return values
        partners = self.partners[k]
        dom = self.eng.dom

        def key(val: int):
            ws = partners.get(val)
            if not ws:
                return (1, 0, val)
            return (0, sum(_popcount(dom[w]) for w in ws), val)

        return sorted(values, key=key)

    def _propagate_removal(self, k: int) -> bool:
        eng = self.eng
        if self.algorithm is not Algorithm.FC:
            return eng.propagate()
        dm = eng.dom[k]
        if self.config.fail_first_singletons and not dm & (dm - 1):
            return self._propagate_after(k)
        return True

    def _propagate_after(self, k: int) -> bool:
        eng = self.eng
        if self.algorithm is not Algorithm.FC:
            eng.inq[k] = True
            eng.queue.append(k)
            return eng.propagate()
        assigned = self.assigned
        self.assigned[k] = True
        self._assigned_log.append(k)
        future = lambda w: not assigned[w]
        if not eng.forward_check(k, future):
            return False
        if self.config.fail_first_singletons:
            dom = eng.dom
            while True:
                nxt = -1
                for w in range(len(dom)):
                    if not assigned[w] and not dom[w] & (dom[w] - 1):
                        nxt = w
                        break
                if nxt < 0:
                    return True
                assigned[nxt] = True
                self._assigned_log.append(nxt)
                if not eng.forward_check(nxt, future):
                    return False
        return True

    # -- search ---------------------------------------------------------

    def run(self) -> tuple[list[dict[VarRef, int]], SearchStats]:
        start = time.perf_counter()
        if self.config.time_limit is not None:
            self.deadline = start + self.config.time_limit
        self._assigned_log: list[int] = []
        eng = self.eng
        root = eng.mark()
        try:
            if self.algorithm is Algorithm.FC:
                ok = all(eng.dom)
                if ok and self.config.fail_first_singletons:
                    ok = self._root_singletons()
            else:
                eng.schedule_all()
                ok = eng.propagate()
            if ok:
                self._search()
        except _Abort:
            self.stats.aborted = True
        eng.clear_queues()
        eng.undo(root)
        for k in self._assigned_log:
            self.assigned[k] = False
        self._assigned_log.clear()
        self.stats.elapsed = time.perf_counter() - start
        return self.solutions, self.stats

    def _root_singletons(self) -> bool:
        eng = self.eng
        assigned = self.assigned
        future = lambda w: not assigned[w]
        progress = True
        while progress:
            progress = False
            for w in range(len(eng.dom)):
                dm = eng.dom[w]
                if not assigned[w] and not dm & (dm - 1):
                    assigned[w] = True
                    self._assigned_log.append(w)
                    if not eng.forward_check(w, future):
                        return False
                    progress = True
        return True

    def _search(self) -> bool:
        if self.config.branching == "binary":
            return self._search_binary()
        return self._search_dway()

    def _search_binary(self) -> bool:
        """Explore the current node; True once the goal is satisfied."""
        self._check_time()
        k = self._pick()
        if k is None:
            return self._leaf()
        eng = self.eng
        stats = self.stats
        dm = eng.dom[k]
        counted = bool(dm & (dm - 1))
        first = self.config.goal is Goal.FIRST
        bit = 1 << self._values(k)[0]
        log_len = len(self._assigned_log)
        mark = eng.mark()
        if counted:
            stats.nodes += 1
            self._log(k, bit.bit_length() - 1)
        self.depth += counted
        if eng.set_dom(k, bit) and self._propagate_after(k):
            if self._search_binary() and first:
                return True
        else:
            eng.clear_queues()
            stats.fails += 1
        self.depth -= counted
        eng.undo(mark)
        self._unassign(log_len)
        if not counted:
            return False
        stats.nodes += 1
        self._log(k, -(bit.bit_length() - 1))
        self.depth += 1
        if eng.set_dom(k, dm & ~bit) and self._propagate_removal(k):
            if self._search_binary() and first:
                return True
        else:
            eng.clear_queues()
            stats.fails += 1
        self.depth -= 1
        eng.undo(mark)
        self._unassign(log_len)
        return False

    def _log(self, k: int, value: int) -> None:
        if self.decisions is not None:
            self.decisions.append((self.depth, self.eng.vars[k], value))

    def _search_dway(self) -> bool:
        """Explore the current node; True once the goal is satisfied."""
        self._check_time()
        k = self._pick()
        if k is None:
            return self._leaf()
        eng = self.eng
        stats = self.stats
        dm = eng.dom[k]
        counted = bool(dm & (dm - 1))
        first = self.config.goal is Goal.FIRST
        for val in self._values(k):
            if not eng.dom[k] >> val & 1:
                continue
            mark = eng.mark()
            log_len = len(self._assigned_log)
            if counted:
                stats.nodes += 1
                self._log(k, val)
            self.depth += counted
            ok = eng.set_dom(k, 1 << val)
            if ok:
                ok = self._propagate_after(k)
            if not ok:
                eng.clear_queues()
                stats.fails += 1
            elif self._search_dway() and first:
                return True
            self.depth -= counted
            eng.undo(mark)
            self._unassign(log_len)
        return False

    def _unassign(self, log_len: int) -> None:
        log = self._assigned_log
        while len(log) > log_len:
            self.assigned[log.pop()] = False

    def _leaf(self) -> bool:
        """All primal variables bound: complete the rest and record it."""
        eng = self.eng
        mark = eng.mark()
        eng.schedule_all()
        ok = eng.propagate() and self._complete()
        eng.clear_queues()
        if ok:
            sol = {eng.vars[k]: eng.dom[k].bit_length() - 1 for k in self.primal}
            self.solutions.append(sol)
            self.stats.solutions += 1
        eng.undo(mark)
        return ok

    def _complete(self) -> bool:
        # first-solution search over the remaining variables; adds no stats
        eng = self.eng
        for k in self.rest:
            dm = eng.dom[k]
            if dm & (dm - 1):
                for val in self._values(k):
                    mark = eng.mark()
                    if eng.set_dom(k, 1 << val) and eng.propagate() and self._complete():
                        return True
                    eng.clear_queues()
                    eng.undo(mark)
                return False
        full = {v: eng.dom[k].bit_length() - 1 for k, v in enumerate(eng.vars)}
        return all(satisfied(c, full) for c in self.problem.constraints)


def solve(problem: Problem, config: SearchConfig = SearchConfig()
          ) -> tuple[list[dict[VarRef, int]], SearchStats]:
    """Search ``problem``; solutions are projected to the primal block."""
    if config.branching not in ("binary", "dway"):
        raise ValueError(f"unknown branching {config.branching!r}")
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20000))
    try:
        return Solver(problem, config).run()
    finally:
        sys.setrecursionlimit(limit)
