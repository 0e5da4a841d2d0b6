"""Trail-based propagation engine over bitmask domains.

The engine compiles a :class:`~permuta.core.Problem` into index-based
structures.  Binary constraints run from a variable event queue; global
constraints (all-different, sum, at-most) run from a second queue once the
variable queue is empty.  Two propagation regimes are available: full
arc-consistency (``propagate``) and forward checking from an assigned
variable (``forward_check``).
"""

from __future__ import annotations

from collections import deque

from .core import (
    AllDifferent, AtMostCount, BinaryTable, Channel, ChannelImplies, DualSepLink,
    Less, NotEquals, Offset, Problem, Sum, UnaryForbid, VarRef,
)


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Wipeout(Exception):
    pass


class Engine:
    """Mutable domain store plus compiled propagators for one problem.

    ``alldiff`` selects how :class:`AllDifferent` constraints propagate:
    ``"gac"`` (matching-based filtering) or ``"decompose"`` (pairwise
    not-equals).
    """

    def __init__(self, problem: Problem, alldiff: str = "gac", domains=None):
        self.problem = problem
        self.vars: list[VarRef] = list(problem.variables)
        self.index = {v: k for k, v in enumerate(self.vars)}
        nv = len(self.vars)
        doms = domains if domains is not None else problem.domain_map
        self.dom = [doms[v].mask for v in self.vars]
        self.seen = list(self.dom)
        top = max((m.bit_length() for m in self.dom), default=1)
        self.full = (1 << (top + 1)) - 1
        self.trail: list[tuple[int, int]] = []
        self.wiped: int | None = None
        self.alldiff_mode = alldiff
        # forward checking keeps channelled primal/dual pairs in sync
        self.channel_views = False

        self.neq: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
        self.chan: list[dict[int, list[tuple[int, int]]]] = [{} for _ in range(nv)]
        self.imp_fwd: list[dict[int, list[tuple[int, int]]]] = [{} for _ in range(nv)]
        self.imp_bwd: list[dict[int, list[tuple[int, int]]]] = [{} for _ in range(nv)]
        self.offsets: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
        self.less_after: list[list[int]] = [[] for _ in range(nv)]
        self.less_before: list[list[int]] = [[] for _ in range(nv)]
        self.tables: list[list[tuple[int, list[int]]]] = [[] for _ in range(nv)]
        self.globals: list = []
        self.globals_of: list[list[int]] = [[] for _ in range(nv)]
        self.unary: list[tuple[int, int]] = []

        for c in problem.constraints:
            self._compile(c)
        self.has_binary = [
            bool(self.neq[k] or self.chan[k] or self.imp_fwd[k] or self.imp_bwd[k]
                 or self.offsets[k] or self.less_after[k] or self.less_before[k]
                 or self.tables[k])
            for k in range(nv)
        ]
        self.queue: deque[int] = deque()
        self.inq = [False] * nv
        self.gqueue: deque[int] = deque()
        self.ginq = [False] * len(self.globals)

    # ------------------------------------------------------------------
    # compilation

    def _compile(self, c) -> None:
        ix = self.index
        if isinstance(c, NotEquals):
            a, b = ix[c.a], ix[c.b]
            ex = 0 if c.exempt is None else 1 << c.exempt
            self.neq[a].append((b, ex))
            self.neq[b].append((a, ex))
        elif isinstance(c, Channel):
            a, b = ix[c.x], ix[c.d]
            self.chan[a].setdefault(c.j, []).append((b, c.i))
            self.chan[b].setdefault(c.i, []).append((a, c.j))
        elif isinstance(c, ChannelImplies):
            a, b = ix[c.x], ix[c.d]
            self.imp_fwd[a].setdefault(c.j, []).append((b, c.i))
            self.imp_bwd[b].setdefault(c.i, []).append((a, c.j))
        elif isinstance(c, AllDifferent):
            scope = [ix[v] for v in c.vars]
            if self.alldiff_mode == "gac":
                self._add_global(AllDiffGAC(scope))
            else:
                for p, a in enumerate(scope):
                    for b in scope[p + 1:]:
                        self.neq[a].append((b, 0))
                        self.neq[b].append((a, 0))
        elif isinstance(c, Offset):
            a, b = ix[c.a], ix[c.b]
            self.offsets[a].append((b, c.k))
            self.offsets[b].append((a, -c.k))
        elif isinstance(c, Less):
            a, b = ix[c.a], ix[c.b]
            self.less_after[a].append(b)
            self.less_before[b].append(a)
        elif isinstance(c, DualSepLink):
            pairs = set()
            da, db = self.problem.domain(c.a), self.problem.domain(c.b)
            for va in da:
                for vb in db:
                    if (va == c.i) == (vb == c.i2):
                        pairs.add((va, vb))
            self._add_table(ix[c.a], ix[c.b], pairs)
        elif isinstance(c, BinaryTable):
            self._add_table(ix[c.a], ix[c.b], c.allowed)
        elif isinstance(c, UnaryForbid):
            forbid = 0
            for v in c.values:
                forbid |= 1 << v
            k = ix[c.a]
            self.unary.append((k, forbid))
            self.dom[k] &= ~forbid
            self.seen[k] = self.dom[k]
        elif isinstance(c, Sum):
            self._add_global(LinearSum([ix[v] for v in c.vars], list(c.weights), c.total))
        elif isinstance(c, AtMostCount):
            self._add_global(AtMost([ix[v] for v in c.vars], c.cap))
        else:
            raise TypeError(f"cannot compile {c!r}")

    def _add_table(self, a: int, b: int, pairs) -> None:
        top = 0
        for va, vb in pairs:
            top = max(top, va, vb)
        sup_ab = [0] * (top + 1)
        sup_ba = [0] * (top + 1)
        for va, vb in pairs:
            sup_ab[va] |= 1 << vb
            sup_ba[vb] |= 1 << va
        self.tables[a].append((b, sup_ab))
        self.tables[b].append((a, sup_ba))

    def _add_global(self, prop) -> None:
        gid = len(self.globals)
        self.globals.append(prop)
        for k in prop.scope:
            self.globals_of[k].append(gid)

    # ------------------------------------------------------------------
    # state

    def mark(self) -> int:
        return len(self.trail)

    def undo(self, mark: int) -> None:
        trail, dom, seen = self.trail, self.dom, self.seen
        while len(trail) > mark:
            k, old = trail.pop()
            dom[k] = old
            seen[k] = old
        self.wiped = None

    def clear_queues(self) -> None:
        for k in self.queue:
            self.inq[k] = False
        self.queue.clear()
        for g in self.gqueue:
            self.ginq[g] = False
        self.gqueue.clear()

    def set_dom(self, k: int, new: int) -> bool:
        """Narrow domain ``k`` to ``new`` (a subset); False on wipeout."""
        old = self.dom[k]
        if new == old:
            return True
        self.trail.append((k, old))
        self.dom[k] = new
        if not new:
            if self.wiped is None:
                self.wiped = k
            return False
        if not self.inq[k]:
            self.inq[k] = True
            self.queue.append(k)
        return True

    def schedule_all(self) -> None:
        """Queue every variable and global, e.g. before the root propagation."""
        for k in range(len(self.vars)):
            # mark every value as freshly removed so binary propagators fire
            self.seen[k] = self.full
            if not self.inq[k]:
                self.inq[k] = True
                self.queue.append(k)
        for g in range(len(self.globals)):
            if not self.ginq[g]:
                self.ginq[g] = True
                self.gqueue.append(g)

    # ------------------------------------------------------------------
    # arc-consistency

    def propagate(self) -> bool:
        """Run every propagator to fixpoint; False on wipeout."""
        dom, seen = self.dom, self.seen
        queue, inq = self.queue, self.inq
        gqueue, ginq = self.gqueue, self.ginq
        neq, chan, offsets, tables = self.neq, self.chan, self.offsets, self.tables
        imp_fwd, imp_bwd = self.imp_fwd, self.imp_bwd
        less_after, less_before = self.less_after, self.less_before
        globals_of, globals_ = self.globals_of, self.globals
        set_dom = self.set_dom
        while True:
            while queue:
                v = queue.popleft()
                inq[v] = False
                cur = dom[v]
                delta = seen[v] & ~cur
                seen[v] = cur
                if not delta:
                    continue
                single = not (cur & (cur - 1))
                if single and neq[v]:
                    for w, ex in neq[v]:
                        dw = dom[w]
                        if dw & cur and cur != ex:
                            if not set_dom(w, dw & ~cur):
                                self.clear_queues()
                                return False
                ch = chan[v]
                if ch:
                    dl = delta
                    while dl:
                        low = dl & -dl
                        dl ^= low
                        for w, i in ch.get(low.bit_length() - 1, ()):
                            dw = dom[w]
                            if dw >> i & 1:
                                if not set_dom(w, dw & ~(1 << i)):
                                    self.clear_queues()
                                    return False
                    if single:
                        for w, i in ch.get(cur.bit_length() - 1, ()):
                            dw = dom[w]
                            bit = 1 << i
                            if dw != bit:
                                if not set_dom(w, dw & bit):
                                    self.clear_queues()
                                    return False
                if imp_bwd[v]:
                    ib = imp_bwd[v]
                    dl = delta
                    while dl:
                        low = dl & -dl
                        dl ^= low
                        for w, j in ib.get(low.bit_length() - 1, ()):
                            dw = dom[w]
                            if dw >> j & 1:
                                if not set_dom(w, dw & ~(1 << j)):
                                    self.clear_queues()
                                    return False
                if single and imp_fwd[v]:
                    for w, i in imp_fwd[v].get(cur.bit_length() - 1, ()):
                        dw = dom[w]
                        bit = 1 << i
                        if dw != bit:
                            if not set_dom(w, dw & bit):
                                self.clear_queues()
                                return False
                for w, k in offsets[v]:
                    allowed = cur << k if k >= 0 else cur >> -k
                    dw = dom[w]
                    if dw & ~allowed:
                        if not set_dom(w, dw & allowed):
                            self.clear_queues()
                            return False
                if less_after[v]:
                    lo = (cur & -cur).bit_length() - 1
                    keep = ~((2 << lo) - 1)
                    for w in less_after[v]:
                        dw = dom[w]
                        if dw & ~keep:
                            if not set_dom(w, dw & keep):
                                self.clear_queues()
                                return False
                if less_before[v]:
                    keep = (1 << (cur.bit_length() - 1)) - 1
                    for w in less_before[v]:
                        dw = dom[w]
                        if dw & ~keep:
                            if not set_dom(w, dw & keep):
                                self.clear_queues()
                                return False
                for w, sup in tables[v]:
                    dw = dom[w]
                    allowed = 0
                    top = len(sup)
                    c2 = cur
                    while c2:
                        low = c2 & -c2
                        c2 ^= low
                        val = low.bit_length() - 1
                        if val < top:
                            allowed |= sup[val]
                    if dw & ~allowed:
                        if not set_dom(w, dw & allowed):
                            self.clear_queues()
                            return False
                for g in globals_of[v]:
                    if not ginq[g]:
                        ginq[g] = True
                        gqueue.append(g)
            if not gqueue:
                return True
            g = gqueue.popleft()
            ginq[g] = False
            if not globals_[g].propagate(self):
                self.clear_queues()
                return False

    # ------------------------------------------------------------------
    # forward checking

    def forward_check(self, v: int, future) -> bool:
        """Prune future variables against the singleton domain of ``v``.

        ``future`` is a predicate on variable indices.  Only constraints
        between ``v`` and future variables are revised.
        """
        dom = self.dom
        cur = dom[v]
        val = cur.bit_length() - 1
        set_dom = self._fc_set
        for w, ex in self.neq[v]:
            if future(w) and dom[w] & cur and cur != ex:
                if not set_dom(w, dom[w] & ~cur):
                    return False
        for j, lst in self.chan[v].items():
            for w, i in lst:
                if not future(w):
                    continue
                bit = 1 << i
                if j == val:
                    new = dom[w] & bit
                else:
                    new = dom[w] & ~bit
                if new != dom[w] and not set_dom(w, new):
                    return False
        for w, i in self.imp_fwd[v].get(val, ()):
            if future(w) and dom[w] != 1 << i:
                if not set_dom(w, dom[w] & (1 << i)):
                    return False
        for i, lst in self.imp_bwd[v].items():
            if i == val:
                continue
            for w, j in lst:
                if future(w) and dom[w] >> j & 1:
                    if not set_dom(w, dom[w] & ~(1 << j)):
                        return False
        for w, k in self.offsets[v]:
            if future(w):
                allowed = cur << k if k >= 0 else cur >> -k
                if dom[w] & ~allowed and not set_dom(w, dom[w] & allowed):
                    return False
        for w in self.less_after[v]:
            if future(w):
                keep = ~((2 << val) - 1)
                if dom[w] & ~keep and not set_dom(w, dom[w] & keep):
                    return False
        for w in self.less_before[v]:
            if future(w):
                keep = (1 << val) - 1
                if dom[w] & ~keep and not set_dom(w, dom[w] & keep):
                    return False
        for w, sup in self.tables[v]:
            if future(w):
                allowed = sup[val] if val < len(sup) else 0
                if dom[w] & ~allowed and not set_dom(w, dom[w] & allowed):
                    return False
        for g in self.globals_of[v]:
            if not self.globals[g].forward_check(self, v, future):
                return False
        return True

    def _fc_set(self, k: int, new: int) -> bool:
        old = self.dom[k]
        if new == old:
            return True
        self.trail.append((k, old))
        self.dom[k] = new
        self.seen[k] = new
        if not new:
            if self.wiped is None:
                self.wiped = k
            return False
        if self.channel_views and self.chan[k]:
            for j in _bits(old & ~new):
                for w, i in self.chan[k].get(j, ()):
                    if self.dom[w] >> i & 1 and not self._fc_set(w, self.dom[w] & ~(1 << i)):
                        return False
        return True


# ----------------------------------------------------------------------
# global propagators


class AllDiffGAC:
    """Matching-based GAC filtering for all-different.

    Keeps the previous maximum matching as a warm start; it is repaired
    against current domains on every call, so it needs no trailing.
    """

    def __init__(self, scope: list[int]):
        self.scope = scope
        self.match: dict[int, int] = {}

    def propagate(self, eng: Engine) -> bool:
        dom = eng.dom
        # values of fixed variables leave every other domain first; the
        # matching then only needs the unfixed rest
        fixed = 0
        done: set[int] = set()
        scope = self.scope
        free = scope
        changed = True
        while changed:
            changed = False
            rest = []
            for v in free:
                dm = dom[v]
                if dm & (dm - 1):
                    rest.append(v)
                elif dm & ~fixed:
                    fixed |= dm
                    done.add(v)
                    changed = True
                elif v not in done:
                    # empty, or a value already taken by another variable
                    return self._fail(eng)
            free = rest
            if changed:
                for v in free:
                    if dom[v] & fixed and not eng.set_dom(v, dom[v] & ~fixed):
                        return False
        return self._gac(eng, free)

    def _fail(self, eng: Engine) -> bool:
        first = min(self.scope, key=lambda u: eng.vars[u])
        eng.set_dom(first, 0)
        return False

    def _gac(self, eng: Engine, scope: list[int]) -> bool:
        dom = eng.dom
        if not scope:
            return True
        doms = [dom[v] for v in scope]
        k = len(scope)
        # matching: var position -> value, value -> var position
        var_val = [-1] * k
        val_var: dict[int, int] = {}
        for p in range(k):
            val = self.match.get(scope[p], -1)
            if val >= 0 and doms[p] >> val & 1 and val not in val_var:
                var_val[p] = val
                val_var[val] = p
        for p in range(k):
            if var_val[p] < 0 and not self._augment(p, doms, var_val, val_var):
                return self._fail(eng)
        self.match = {scope[p]: var_val[p] for p in range(k)}

        matched = 0
        union = 0
        for p in range(k):
            matched |= 1 << var_val[p]
            union |= doms[p]
        free = union & ~matched
        # u -> w when u can take w's matched value, displacing w
        succ: list[list[int]] = []
        pred: list[list[int]] = [[] for _ in range(k)]
        for u in range(k):
            m = doms[u] & matched & ~(1 << var_val[u])
            out = []
            while m:
                low = m & -m
                w = val_var[low.bit_length() - 1]
                out.append(w)
                pred[w].append(u)
                m ^= low
            succ.append(out)
        # variables with an alternating path to a free value
        good = [bool(doms[u] & free) for u in range(k)]
        stack = [u for u in range(k) if good[u]]
        while stack:
            w = stack.pop()
            for u in pred[w]:
                if not good[u]:
                    good[u] = True
                    stack.append(u)
        comp = _tarjan(succ, k)
        for p in range(k):
            mine = 1 << var_val[p]
            keep = mine | (doms[p] & free)
            m = doms[p] & matched & ~mine
            cp = comp[p]
            while m:
                low = m & -m
                q = val_var[low.bit_length() - 1]
                if good[q] or comp[q] == cp:
                    keep |= low
                m ^= low
            if keep != doms[p]:
                if not eng.set_dom(scope[p], keep):
                    return False
        return True

    @staticmethod
    def _augment(root, doms, var_val, val_var) -> bool:
        # iterative DFS for an augmenting path from var position ``root``
        visited = set()
        parent: dict[int, tuple[int, int]] = {}
        stack = [root]
        while stack:
            p = stack.pop()
            for val in _bits(doms[p]):
                if val in visited:
                    continue
                visited.add(val)
                parent[val] = p
                q = val_var.get(val)
                if q is None:
                    # flip along the path
                    while True:
                        pp = parent[val]
                        prev = var_val[pp]
                        var_val[pp] = val
                        val_var[val] = pp
                        if pp == root:
                            return True
                        val = prev
                stack.append(q)
        return False

    def forward_check(self, eng: Engine, v: int, future) -> bool:
        # under forward checking all-different acts as pairwise not-equals
        cur = eng.dom[v]
        for w in self.scope:
            if w != v and future(w) and eng.dom[w] & cur:
                if not eng._fc_set(w, eng.dom[w] & ~cur):
                    return False
        return True


def _tarjan(succ: list[list[int]], nn: int) -> list[int]:
    index = [-1] * nn
    low = [0] * nn
    comp = [-1] * nn
    onstack = [False] * nn
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(nn):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        onstack[root] = True
        while work:
            node, pos = work[-1]
            edges = succ[node]
            if pos < len(edges):
                work[-1] = (node, pos + 1)
                w = edges[pos]
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    onstack[w] = True
                    work.append((w, 0))
                elif onstack[w] and index[w] < low[node]:
                    low[node] = index[w]
            else:
                work.pop()
                if work:
                    parent = work[-1][0]
                    if low[node] < low[parent]:
                        low[parent] = low[node]
                if low[node] == index[node]:
                    while True:
                        w = stack.pop()
                        onstack[w] = False
                        comp[w] = ncomp
                        if w == node:
                            break
                    ncomp += 1
    return comp


class LinearSum:
    """Bounds propagation for ``sum(w_k * x_k) = total``."""

    def __init__(self, scope: list[int], weights: list[int], total: int):
        self.scope = scope
        self.weights = weights
        self.total = total

    def propagate(self, eng: Engine) -> bool:
        dom = eng.dom
        terms = list(zip(self.scope, self.weights))
        changed = True
        while changed:
            changed = False
            lo_sum = hi_sum = 0
            bounds = []
            for v, w in terms:
                dm = dom[v]
                lo = (dm & -dm).bit_length() - 1
                hi = dm.bit_length() - 1
                tl, th = (w * lo, w * hi) if w > 0 else (w * hi, w * lo)
                bounds.append((tl, th))
                lo_sum += tl
                hi_sum += th
            if lo_sum > self.total or hi_sum < self.total:
                first = min(self.scope, key=lambda k: eng.vars[k])
                eng.set_dom(first, 0)
                return False
            for (v, w), (tl, th) in zip(terms, bounds):
                # w * x in [total - (hi_sum - th), total - (lo_sum - tl)]
                t_lo = self.total - (hi_sum - th)
                t_hi = self.total - (lo_sum - tl)
                if w > 0:
                    x_lo = -((-t_lo) // w)
                    x_hi = t_hi // w
                else:
                    x_lo = -((-t_hi) // w)
                    x_hi = t_lo // w
                dm = dom[v]
                keep = dm
                if x_lo > 0:
                    keep &= ~((1 << x_lo) - 1)
                if x_hi < 0:
                    keep = 0
                else:
                    keep &= (2 << x_hi) - 1
                if keep != dm:
                    if not eng.set_dom(v, keep):
                        return False
                    changed = True
        return True

    def forward_check(self, eng: Engine, v: int, future) -> bool:
        # revise once the constraint has a single future variable left
        open_ = [k for k in self.scope if future(k)]
        if len(open_) != 1:
            if not open_:
                total = sum(w * (eng.dom[k].bit_length() - 1)
                            for k, w in zip(self.scope, self.weights))
                if total != self.total:
                    eng.wiped = v
                    return False
            return True
        last = open_[0]
        rest = 0
        wl = 0
        for k, w in zip(self.scope, self.weights):
            if k == last:
                wl = w
            else:
                rest += w * (eng.dom[k].bit_length() - 1)
        need, r = divmod(self.total - rest, wl)
        keep = eng.dom[last] & (1 << need) if r == 0 and need >= 0 else 0
        if keep != eng.dom[last]:
            return eng._fc_set(last, keep)
        return True


class AtMost:
    """Each value may be taken by at most ``cap`` variables of the scope."""

    def __init__(self, scope: list[int], cap: int):
        self.scope = scope
        self.cap = cap

    def propagate(self, eng: Engine) -> bool:
        dom = eng.dom
        counts: dict[int, int] = {}
        for v in self.scope:
            dm = dom[v]
            if not dm & (dm - 1):
                counts[dm] = counts.get(dm, 0) + 1
        full = 0
        for bit, cnt in counts.items():
            if cnt > self.cap:
                eng.set_dom(min(self.scope, key=lambda k: eng.vars[k]), 0)
                return False
            if cnt == self.cap:
                full |= bit
        if full:
            for v in self.scope:
                dm = dom[v]
                if dm & (dm - 1) and dm & full:
                    if not eng.set_dom(v, dm & ~full):
                        return False
        return True

    def forward_check(self, eng: Engine, v: int, future) -> bool:
        bit = eng.dom[v]
        cnt = sum(1 for k in self.scope if not future(k) and eng.dom[k] == bit)
        if cnt > self.cap:
            eng.wiped = v
            return False
        if cnt == self.cap:
            for k in self.scope:
                if future(k) and eng.dom[k] & bit:
                    if not eng._fc_set(k, eng.dom[k] & ~bit):
                        return False
        return True
