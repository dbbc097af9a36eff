# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled leftmost-innermost normalization kernel.

C mirror of ``_pure.PureKernel``: the same task machine over the same rule
programs, with the arena, intern table, memo table, and all stacks held in
flat C arrays.  Behaviour and statistics must match the pure kernel exactly;
the parity test suite holds both to that.
"""

from libc.stdlib cimport calloc, free, malloc, realloc
from libc.string cimport memcpy, memset

from ._types import BudgetExceeded

ctypedef int i32
ctypedef long long i64
ctypedef unsigned long long u64
ctypedef unsigned char u8

cdef enum:
    FLAG_NORMAL = 1
    FLAG_HAS_DEFINED = 2

cdef enum:
    TAG_EVAL = 0
    TAG_BUILD = 1
    TAG_TRYRULE = 2
    TAG_CONDCHECK = 3
    TAG_STORE = 4

cdef i64 SIZE_CAP = (<i64>1) << 62
cdef u64 FNV_OFFSET = <u64>1469598103934665603
cdef u64 FNV_PRIME = <u64>1099511628211

DEF MAX_ARITY = 64


cdef struct Frame:
    i32 tag
    i32 a      # term id (EVAL/TRYRULE/CONDCHECK/STORE) or head (BUILD)
    i32 b      # candidate cursor (TRYRULE/CONDCHECK) or arg count (BUILD)
    i64 aux    # bindings offset (CONDCHECK)


cdef inline u64 _mix(u64 h, u64 v) nogil:
    return (h ^ (v + 1)) * FNV_PRIME


cdef class CompiledKernel:
    backend = "compiled"

    # arena
    cdef i32* node_head
    cdef i64* node_argoff
    cdef i32* node_argn
    cdef u8* node_flags
    cdef i64* node_size
    cdef u64* node_hash
    cdef i64 n_nodes, cap_nodes

    cdef i32* argpool
    cdef i64 argpool_top, argpool_cap

    # intern hash table (open addressing, power-of-two capacity)
    cdef i32* itable
    cdef u64 itable_mask
    cdef i64 itable_count

    # memo table
    cdef i32* mkeys
    cdef i32* mvals
    cdef u64 mtable_mask
    cdef i64 mcount
    cdef i64 memo_limit

    # symbols
    cdef i32 n_symbols
    cdef i32* sym_arity
    cdef u8* sym_is_cons
    cdef i32* nullary_id  # interned id of nullary symbol, or -1

    # rules
    cdef i32 n_rules
    cdef i32* prog            # all programs, concatenated
    cdef i64* r_lhs_off
    cdef i32* r_lhs_len
    cdef i64* r_rhs_off
    cdef i32* r_rhs_len
    cdef i64* r_cl_off
    cdef i32* r_cl_len
    cdef i64* r_cr_off
    cdef i32* r_cr_len
    cdef i32* r_nvars

    # rule index per head symbol
    cdef i64* h_ent_off       # into ent_* arrays
    cdef i32* h_ent_len
    cdef i64* h_def_off       # default candidate list, into rules_pool
    cdef i32* h_def_len
    cdef i32* ent_cons
    cdef i64* ent_off         # into rules_pool
    cdef i32* ent_len
    cdef i32* rules_pool

    # run stacks (reused across runs)
    cdef Frame* tasks
    cdef i64 tasks_cap
    cdef i32* vals
    cdef i64 vals_cap
    cdef i32* msubj           # match subject stack
    cdef i64 msubj_cap
    cdef i32* bind
    cdef i64 bind_cap
    cdef i32* inst            # instantiation output stack
    cdef i64 inst_cap

    cdef i64 peak
    cdef object cspec

    def __cinit__(self, object cspec, i64 memo_limit=1 << 22):
        self.cspec = cspec
        self.memo_limit = memo_limit if memo_limit > 0 else 1

        self.cap_nodes = 1 << 16
        self.node_head = <i32*>malloc(self.cap_nodes * sizeof(i32))
        self.node_argoff = <i64*>malloc(self.cap_nodes * sizeof(i64))
        self.node_argn = <i32*>malloc(self.cap_nodes * sizeof(i32))
        self.node_flags = <u8*>malloc(self.cap_nodes * sizeof(u8))
        self.node_size = <i64*>malloc(self.cap_nodes * sizeof(i64))
        self.node_hash = <u64*>malloc(self.cap_nodes * sizeof(u64))
        self.n_nodes = 0

        self.argpool_cap = 1 << 18
        self.argpool = <i32*>malloc(self.argpool_cap * sizeof(i32))
        self.argpool_top = 0

        self.itable_mask = (1 << 17) - 1
        self.itable = <i32*>malloc((self.itable_mask + 1) * sizeof(i32))
        memset(self.itable, 0xFF, (self.itable_mask + 1) * sizeof(i32))
        self.itable_count = 0

        self.mtable_mask = (1 << 16) - 1
        self.mkeys = <i32*>malloc((self.mtable_mask + 1) * sizeof(i32))
        self.mvals = <i32*>malloc((self.mtable_mask + 1) * sizeof(i32))
        memset(self.mkeys, 0xFF, (self.mtable_mask + 1) * sizeof(i32))
        self.mcount = 0

        self.tasks_cap = 1 << 12
        self.tasks = <Frame*>malloc(self.tasks_cap * sizeof(Frame))
        self.vals_cap = 1 << 12
        self.vals = <i32*>malloc(self.vals_cap * sizeof(i32))
        self.msubj_cap = 1 << 10
        self.msubj = <i32*>malloc(self.msubj_cap * sizeof(i32))
        self.bind_cap = 1 << 10
        self.bind = <i32*>malloc(self.bind_cap * sizeof(i32))
        self.inst_cap = 1 << 10
        self.inst = <i32*>malloc(self.inst_cap * sizeof(i32))

        self._load_spec(cspec)

    def __dealloc__(self):
        free(self.node_head); free(self.node_argoff); free(self.node_argn)
        free(self.node_flags); free(self.node_size); free(self.node_hash)
        free(self.argpool); free(self.itable)
        free(self.mkeys); free(self.mvals)
        free(self.sym_arity); free(self.sym_is_cons); free(self.nullary_id)
        free(self.prog)
        free(self.r_lhs_off); free(self.r_lhs_len)
        free(self.r_rhs_off); free(self.r_rhs_len)
        free(self.r_cl_off); free(self.r_cl_len)
        free(self.r_cr_off); free(self.r_cr_len)
        free(self.r_nvars)
        free(self.h_ent_off); free(self.h_ent_len)
        free(self.h_def_off); free(self.h_def_len)
        free(self.ent_cons); free(self.ent_off); free(self.ent_len)
        free(self.rules_pool)
        free(self.tasks); free(self.vals); free(self.msubj)
        free(self.bind); free(self.inst)

    # -- spec loading ----------------------------------------------------------

    def _load_spec(self, object cspec):
        arity = cspec.arity
        is_cons = cspec.is_constructor
        cdef i32 n = len(arity)
        self.n_symbols = n
        self.sym_arity = <i32*>malloc(n * sizeof(i32))
        self.sym_is_cons = <u8*>malloc(n * sizeof(u8))
        self.nullary_id = <i32*>malloc(n * sizeof(i32))
        cdef i32 i
        for i in range(n):
            if arity[i] > MAX_ARITY:
                raise ValueError("symbol arity exceeds kernel limit")
            self.sym_arity[i] = arity[i]
            self.sym_is_cons[i] = 1 if is_cons[i] else 0
            self.nullary_id[i] = -1

        rules = cspec.rules
        cdef i32 nr = len(rules)
        self.n_rules = nr
        self.r_lhs_off = <i64*>malloc(nr * sizeof(i64))
        self.r_lhs_len = <i32*>malloc(nr * sizeof(i32))
        self.r_rhs_off = <i64*>malloc(nr * sizeof(i64))
        self.r_rhs_len = <i32*>malloc(nr * sizeof(i32))
        self.r_cl_off = <i64*>malloc(nr * sizeof(i64))
        self.r_cl_len = <i32*>malloc(nr * sizeof(i32))
        self.r_cr_off = <i64*>malloc(nr * sizeof(i64))
        self.r_cr_len = <i32*>malloc(nr * sizeof(i32))
        self.r_nvars = <i32*>malloc(nr * sizeof(i32))

        flat = []
        cdef i32 r
        for r in range(nr):
            rule = rules[r]
            self.r_lhs_off[r] = len(flat)
            self.r_lhs_len[r] = len(rule.lhs)
            flat.extend(rule.lhs)
            self.r_rhs_off[r] = len(flat)
            self.r_rhs_len[r] = len(rule.rhs)
            flat.extend(rule.rhs)
            if rule.cond_left is not None:
                self.r_cl_off[r] = len(flat)
                self.r_cl_len[r] = len(rule.cond_left)
                flat.extend(rule.cond_left)
                self.r_cr_off[r] = len(flat)
                self.r_cr_len[r] = len(rule.cond_right)
                flat.extend(rule.cond_right)
            else:
                self.r_cl_off[r] = 0
                self.r_cl_len[r] = 0
                self.r_cr_off[r] = 0
                self.r_cr_len[r] = 0
            self.r_nvars[r] = rule.nvars
        self.prog = <i32*>malloc(max(len(flat), 1) * sizeof(i32))
        for i in range(len(flat)):
            self.prog[i] = flat[i]

        # flatten the per-head candidate index
        ent_cons_l = []
        ent_off_l = []
        ent_len_l = []
        pool_l = []
        h_ent_off_l = [0] * n
        h_ent_len_l = [0] * n
        h_def_off_l = [0] * n
        h_def_len_l = [0] * n
        index = cspec.index
        for head, hidx in index.items():
            h_ent_off_l[head] = len(ent_cons_l)
            h_ent_len_l[head] = len(hidx.buckets)
            for cons, rule_ids in hidx.buckets.items():
                ent_cons_l.append(cons)
                ent_off_l.append(len(pool_l))
                ent_len_l.append(len(rule_ids))
                pool_l.extend(rule_ids)
            # arity-0 heads keep their full list in the default slot
            default = hidx.all_rules if self.sym_arity[head] == 0 else hidx.default
            h_def_off_l[head] = len(pool_l)
            h_def_len_l[head] = len(default)
            pool_l.extend(default)

        self.h_ent_off = <i64*>malloc(n * sizeof(i64))
        self.h_ent_len = <i32*>malloc(n * sizeof(i32))
        self.h_def_off = <i64*>malloc(n * sizeof(i64))
        self.h_def_len = <i32*>malloc(n * sizeof(i32))
        for i in range(n):
            self.h_ent_off[i] = h_ent_off_l[i]
            self.h_ent_len[i] = h_ent_len_l[i]
            self.h_def_off[i] = h_def_off_l[i]
            self.h_def_len[i] = h_def_len_l[i]
        self.ent_cons = <i32*>malloc(max(len(ent_cons_l), 1) * sizeof(i32))
        self.ent_off = <i64*>malloc(max(len(ent_off_l), 1) * sizeof(i64))
        self.ent_len = <i32*>malloc(max(len(ent_len_l), 1) * sizeof(i32))
        for i in range(len(ent_cons_l)):
            self.ent_cons[i] = ent_cons_l[i]
            self.ent_off[i] = ent_off_l[i]
            self.ent_len[i] = ent_len_l[i]
        self.rules_pool = <i32*>malloc(max(len(pool_l), 1) * sizeof(i32))
        for i in range(len(pool_l)):
            self.rules_pool[i] = pool_l[i]

    # -- arena ------------------------------------------------------------------

    cdef void _grow_nodes(self) :
        self.cap_nodes *= 2
        self.node_head = <i32*>realloc(self.node_head, self.cap_nodes * sizeof(i32))
        self.node_argoff = <i64*>realloc(self.node_argoff, self.cap_nodes * sizeof(i64))
        self.node_argn = <i32*>realloc(self.node_argn, self.cap_nodes * sizeof(i32))
        self.node_flags = <u8*>realloc(self.node_flags, self.cap_nodes * sizeof(u8))
        self.node_size = <i64*>realloc(self.node_size, self.cap_nodes * sizeof(i64))
        self.node_hash = <u64*>realloc(self.node_hash, self.cap_nodes * sizeof(u64))

    cdef void _grow_itable(self):
        cdef u64 new_mask = (self.itable_mask + 1) * 2 - 1
        cdef i32* table = <i32*>malloc((new_mask + 1) * sizeof(i32))
        memset(table, 0xFF, (new_mask + 1) * sizeof(i32))
        cdef i64 node
        cdef u64 slot
        for node in range(self.n_nodes):
            slot = self.node_hash[node] & new_mask
            while table[slot] != -1:
                slot = (slot + 1) & new_mask
            table[slot] = <i32>node
        free(self.itable)
        self.itable = table
        self.itable_mask = new_mask

    cdef i32 _intern(self, i32 head, i32* args, i32 n):
        cdef u64 h = _mix(FNV_OFFSET, <u64>head)
        cdef i32 i
        for i in range(n):
            h = _mix(h, <u64>args[i])
        cdef u64 slot = h & self.itable_mask
        cdef i32 nid
        cdef i64 off
        cdef bint same
        while True:
            nid = self.itable[slot]
            if nid == -1:
                break
            if self.node_hash[nid] == h and self.node_head[nid] == head \
                    and self.node_argn[nid] == n:
                same = True
                off = self.node_argoff[nid]
                for i in range(n):
                    if self.argpool[off + i] != args[i]:
                        same = False
                        break
                if same:
                    return nid
            slot = (slot + 1) & self.itable_mask

        # create
        if self.n_nodes == self.cap_nodes:
            self._grow_nodes()
        while self.argpool_top + n > self.argpool_cap:
            self.argpool_cap *= 2
            self.argpool = <i32*>realloc(self.argpool, self.argpool_cap * sizeof(i32))
        nid = <i32>self.n_nodes
        self.n_nodes += 1
        self.node_head[nid] = head
        self.node_argoff[nid] = self.argpool_top
        self.node_argn[nid] = n
        self.node_flags[nid] = 0
        self.node_hash[nid] = h
        cdef i64 size = 1
        for i in range(n):
            self.argpool[self.argpool_top + i] = args[i]
            size += self.node_size[args[i]]
        if size > SIZE_CAP:
            size = SIZE_CAP
        self.node_size[nid] = size
        if size > self.peak:
            self.peak = size
        self.argpool_top += n
        self.itable[slot] = nid
        self.itable_count += 1
        if self.itable_count * 4 > (<i64>self.itable_mask + 1) * 3:
            self._grow_itable()
        return nid

    # -- memo table ---------------------------------------------------------------

    cdef void _memo_clear(self):
        memset(self.mkeys, 0xFF, (self.mtable_mask + 1) * sizeof(i32))
        self.mcount = 0

    cdef void _memo_grow(self):
        cdef u64 new_mask = (self.mtable_mask + 1) * 2 - 1
        cdef i32* keys = <i32*>malloc((new_mask + 1) * sizeof(i32))
        cdef i32* vals = <i32*>malloc((new_mask + 1) * sizeof(i32))
        memset(keys, 0xFF, (new_mask + 1) * sizeof(i32))
        cdef u64 slot, nslot
        cdef i32 key
        for slot in range(self.mtable_mask + 1):
            key = self.mkeys[slot]
            if key == -1:
                continue
            nslot = (_mix(FNV_OFFSET, <u64>key)) & new_mask
            while keys[nslot] != -1:
                nslot = (nslot + 1) & new_mask
            keys[nslot] = key
            vals[nslot] = self.mvals[slot]
        free(self.mkeys)
        free(self.mvals)
        self.mkeys = keys
        self.mvals = vals
        self.mtable_mask = new_mask

    cdef inline i32 _memo_get(self, i32 key):
        cdef u64 slot = (_mix(FNV_OFFSET, <u64>key)) & self.mtable_mask
        cdef i32 k
        while True:
            k = self.mkeys[slot]
            if k == -1:
                return -1
            if k == key:
                return self.mvals[slot]
            slot = (slot + 1) & self.mtable_mask

    cdef void _memo_put(self, i32 key, i32 value):
        if self.mcount >= self.memo_limit:
            self._memo_clear()
        elif (self.mcount + 1) * 4 > (<i64>self.mtable_mask + 1) * 3:
            self._memo_grow()
        cdef u64 slot = (_mix(FNV_OFFSET, <u64>key)) & self.mtable_mask
        while self.mkeys[slot] != -1:
            if self.mkeys[slot] == key:
                self.mvals[slot] = value
                return
            slot = (slot + 1) & self.mtable_mask
        self.mkeys[slot] = key
        self.mvals[slot] = value
        self.mcount += 1

    # -- python-facing arena API ------------------------------------------------

    cpdef i32 intern(self, i32 head, tuple args):
        cdef i32 buf[MAX_ARITY]
        cdef i32 n = len(args)
        if n > MAX_ARITY:
            raise ValueError("arity exceeds kernel limit")
        cdef i32 i
        for i in range(n):
            buf[i] = args[i]
        return self._intern(head, buf, n)

    def head_of(self, i32 nid):
        return self.node_head[nid]

    def args_of(self, i32 nid):
        cdef i64 off = self.node_argoff[nid]
        cdef i32 n = self.node_argn[nid]
        return tuple(self.argpool[off + i] for i in range(n))

    def size_of(self, i32 nid):
        return self.node_size[nid]

    def memo_len(self):
        return self.mcount

    def node_count(self):
        return self.n_nodes

    # -- evaluation ----------------------------------------------------------------

    def normalize(self, i32 root, object max_rewrites_o, object max_depth_o,
                  bint memo_on):
        cdef i64 max_rewrites = max_rewrites_o
        cdef i64 max_depth = max_depth_o
        cdef i64 rewrites = 0
        cdef i64 cond_evals = 0
        self.peak = self.node_size[root]

        cdef Frame* tasks = self.tasks
        cdef i64 tcap = self.tasks_cap
        cdef i64 ttop = 0
        cdef i32* vals = self.vals
        cdef i64 vcap = self.vals_cap
        cdef i64 vtop = 0
        cdef i64 bind_top = 0

        cdef Frame fr
        cdef i32 t2, head, n, hit, nf
        cdef i64 off
        cdef i32 i, a
        cdef bint ready, fired
        cdef i32 k, nc, rule_id
        cdef i64 cand_off
        cdef u8 f

        tasks[0].tag = TAG_EVAL
        tasks[0].a = root
        ttop = 1

        while ttop > 0:
            if ttop > max_depth:
                self.tasks = tasks; self.tasks_cap = tcap
                self.vals = vals; self.vals_cap = vcap
                raise BudgetExceeded("depth", rewrites, cond_evals, self.peak)
            ttop -= 1
            fr = tasks[ttop]

            if fr.tag == TAG_EVAL:
                t2 = fr.a
                if self.node_flags[t2] & FLAG_NORMAL:
                    if vtop == vcap:
                        vcap *= 2
                        vals = <i32*>realloc(vals, vcap * sizeof(i32))
                    vals[vtop] = t2
                    vtop += 1
                    continue
                if memo_on:
                    hit = self._memo_get(t2)
                    if hit != -1:
                        if vtop == vcap:
                            vcap *= 2
                            vals = <i32*>realloc(vals, vcap * sizeof(i32))
                        vals[vtop] = hit
                        vtop += 1
                        continue
                head = self.node_head[t2]
                n = self.node_argn[t2]
                if n:
                    off = self.node_argoff[t2]
                    ready = True
                    for i in range(n):
                        if not (self.node_flags[self.argpool[off + i]] & FLAG_NORMAL):
                            ready = False
                            break
                    if not ready:
                        while ttop + n + 1 > tcap:
                            tcap *= 2
                            tasks = <Frame*>realloc(tasks, tcap * sizeof(Frame))
                        tasks[ttop].tag = TAG_BUILD
                        tasks[ttop].a = head
                        tasks[ttop].b = n
                        ttop += 1
                        for i in range(n - 1, -1, -1):
                            tasks[ttop].tag = TAG_EVAL
                            tasks[ttop].a = self.argpool[off + i]
                            ttop += 1
                        continue
            elif fr.tag == TAG_BUILD:
                head = fr.a
                n = fr.b
                vtop -= n
                t2 = self._intern(head, vals + vtop, n)
                if self.node_flags[t2] & FLAG_NORMAL:
                    vals[vtop] = t2
                    vtop += 1
                    continue
                if memo_on:
                    hit = self._memo_get(t2)
                    if hit != -1:
                        vals[vtop] = hit
                        vtop += 1
                        continue
            elif fr.tag == TAG_TRYRULE or fr.tag == TAG_CONDCHECK:
                t2 = fr.a
                k = fr.b
                if fr.tag == TAG_CONDCHECK:
                    # both condition sides are on the value stack
                    vtop -= 2
                    cond_evals += 1
                    rule_id = self._candidate(t2, k)
                    if vals[vtop] == vals[vtop + 1]:
                        rewrites += 1
                        if rewrites > max_rewrites:
                            self.tasks = tasks; self.tasks_cap = tcap
                            self.vals = vals; self.vals_cap = vcap
                            raise BudgetExceeded(
                                "rewrites", rewrites, cond_evals, self.peak)
                        bind_top = fr.aux
                        nf = self._instantiate(
                            self.r_rhs_off[rule_id], self.r_rhs_len[rule_id],
                            self.bind + fr.aux)
                        while ttop + 2 > tcap:
                            tcap *= 2
                            tasks = <Frame*>realloc(tasks, tcap * sizeof(Frame))
                        if memo_on:
                            tasks[ttop].tag = TAG_STORE
                            tasks[ttop].a = t2
                            ttop += 1
                        tasks[ttop].tag = TAG_EVAL
                        tasks[ttop].a = nf
                        ttop += 1
                        continue
                    bind_top = fr.aux
                    k += 1
                # scan candidates starting at k
                fired = False
                nc = self._candidate_count(t2)
                while k < nc:
                    rule_id = self._candidate(t2, k)
                    if not self._match(rule_id, t2, bind_top):
                        k += 1
                        continue
                    if self.r_cl_len[rule_id] == 0:
                        rewrites += 1
                        if rewrites > max_rewrites:
                            self.tasks = tasks; self.tasks_cap = tcap
                            self.vals = vals; self.vals_cap = vcap
                            raise BudgetExceeded(
                                "rewrites", rewrites, cond_evals, self.peak)
                        nf = self._instantiate(
                            self.r_rhs_off[rule_id], self.r_rhs_len[rule_id],
                            self.bind + bind_top)
                        while ttop + 2 > tcap:
                            tcap *= 2
                            tasks = <Frame*>realloc(tasks, tcap * sizeof(Frame))
                        if memo_on:
                            tasks[ttop].tag = TAG_STORE
                            tasks[ttop].a = t2
                            ttop += 1
                        tasks[ttop].tag = TAG_EVAL
                        tasks[ttop].a = nf
                        ttop += 1
                    else:
                        # park the bindings; evaluate both condition sides
                        while ttop + 3 > tcap:
                            tcap *= 2
                            tasks = <Frame*>realloc(tasks, tcap * sizeof(Frame))
                        tasks[ttop].tag = TAG_CONDCHECK
                        tasks[ttop].a = t2
                        tasks[ttop].b = k
                        tasks[ttop].aux = bind_top
                        ttop += 1
                        tasks[ttop].tag = TAG_EVAL
                        tasks[ttop].a = self._instantiate(
                            self.r_cr_off[rule_id], self.r_cr_len[rule_id],
                            self.bind + bind_top)
                        ttop += 1
                        tasks[ttop].tag = TAG_EVAL
                        tasks[ttop].a = self._instantiate(
                            self.r_cl_off[rule_id], self.r_cl_len[rule_id],
                            self.bind + bind_top)
                        ttop += 1
                        bind_top += self.r_nvars[rule_id]
                    fired = True
                    break
                if not fired:
                    self.node_flags[t2] |= FLAG_NORMAL | FLAG_HAS_DEFINED
                    if memo_on:
                        self._memo_put(t2, t2)
                    if vtop == vcap:
                        vcap *= 2
                        vals = <i32*>realloc(vals, vcap * sizeof(i32))
                    vals[vtop] = t2
                    vtop += 1
                continue
            else:  # TAG_STORE
                self._memo_put(fr.a, vals[vtop - 1])
                continue

            # t2 has normal arguments; reduce at the head.
            head = self.node_head[t2]
            n = self.node_argn[t2]
            if self.sym_is_cons[head]:
                f = FLAG_NORMAL
                off = self.node_argoff[t2]
                for i in range(n):
                    f |= self.node_flags[self.argpool[off + i]] & FLAG_HAS_DEFINED
                self.node_flags[t2] |= f
                if vtop == vcap:
                    vcap *= 2
                    vals = <i32*>realloc(vals, vcap * sizeof(i32))
                vals[vtop] = t2
                vtop += 1
                continue
            if ttop == tcap:
                tcap *= 2
                tasks = <Frame*>realloc(tasks, tcap * sizeof(Frame))
            tasks[ttop].tag = TAG_TRYRULE
            tasks[ttop].a = t2
            tasks[ttop].b = 0
            ttop += 1

        self.tasks = tasks
        self.tasks_cap = tcap
        self.vals = vals
        self.vals_cap = vcap
        nf = vals[0]
        return (
            nf,
            rewrites,
            cond_evals,
            self.peak,
            bool(self.node_flags[nf] & FLAG_HAS_DEFINED),
        )

    # -- candidate selection, matching, instantiation ------------------------------

    cdef inline i32 _candidate_count(self, i32 t2):
        cdef i32 head = self.node_head[t2]
        cdef i32 n = self.node_argn[t2]
        cdef i32 arg0head, i
        cdef i64 eoff
        if n == 0:
            return self.h_def_len[head]
        arg0head = self.node_head[self.argpool[self.node_argoff[t2]]]
        eoff = self.h_ent_off[head]
        for i in range(self.h_ent_len[head]):
            if self.ent_cons[eoff + i] == arg0head:
                return self.ent_len[eoff + i]
        return self.h_def_len[head]

    cdef inline i32 _candidate(self, i32 t2, i32 k):
        cdef i32 head = self.node_head[t2]
        cdef i32 n = self.node_argn[t2]
        cdef i32 arg0head, i
        cdef i64 eoff
        if n == 0:
            return self.rules_pool[self.h_def_off[head] + k]
        arg0head = self.node_head[self.argpool[self.node_argoff[t2]]]
        eoff = self.h_ent_off[head]
        for i in range(self.h_ent_len[head]):
            if self.ent_cons[eoff + i] == arg0head:
                return self.rules_pool[self.ent_off[eoff + i] + k]
        return self.rules_pool[self.h_def_off[head] + k]

    cdef bint _match(self, i32 rule_id, i32 t2, i64 bind_off):
        cdef i64 poff = self.r_lhs_off[rule_id]
        cdef i32 plen = self.r_lhs_len[rule_id]
        cdef i32 nvars = self.r_nvars[rule_id]
        if bind_off + nvars > self.bind_cap:
            while bind_off + nvars > self.bind_cap:
                self.bind_cap *= 2
            self.bind = <i32*>realloc(self.bind, self.bind_cap * sizeof(i32))
        cdef i32* bind = self.bind + bind_off
        cdef i32 i
        for i in range(nvars):
            bind[i] = -1

        cdef i32* subj = self.msubj
        cdef i64 scap = self.msubj_cap
        cdef i64 stop = 0
        cdef i32 n = self.node_argn[t2]
        cdef i64 off = self.node_argoff[t2]
        # push subject arguments so the leftmost pops first
        cdef i32 j
        for j in range(n - 1, -1, -1):
            subj[stop] = self.argpool[off + j]
            stop += 1

        cdef i32 p, s, slot, sn
        cdef i64 soff
        for i in range(plen):
            stop -= 1
            s = subj[stop]
            p = self.prog[poff + i]
            if p < 0:
                slot = -p - 1
                if bind[slot] < 0:
                    bind[slot] = s
                elif bind[slot] != s:
                    return False
            else:
                if self.node_head[s] != p:
                    return False
                sn = self.node_argn[s]
                if sn:
                    soff = self.node_argoff[s]
                    while stop + sn > scap:
                        scap *= 2
                        subj = <i32*>realloc(subj, scap * sizeof(i32))
                        self.msubj = subj
                        self.msubj_cap = scap
                    for j in range(sn - 1, -1, -1):
                        subj[stop] = self.argpool[soff + j]
                        stop += 1
        return True

    cdef i32 _instantiate(self, i64 poff, i32 plen, i32* bind):
        cdef i32* out = self.inst
        cdef i64 ocap = self.inst_cap
        cdef i64 otop = 0
        cdef i32 args[MAX_ARITY]
        cdef i32 i, p, kk, m, nid
        for i in range(plen - 1, -1, -1):
            p = self.prog[poff + i]
            if p < 0:
                nid = bind[-p - 1]
            else:
                kk = self.sym_arity[p]
                if kk == 0:
                    nid = self.nullary_id[p]
                    if nid == -1:
                        nid = self._intern(p, args, 0)
                        self.nullary_id[p] = nid
                else:
                    for m in range(kk):
                        args[m] = out[otop - 1 - m]
                    otop -= kk
                    nid = self._intern(p, args, kk)
            if otop == ocap:
                ocap *= 2
                out = <i32*>realloc(out, ocap * sizeof(i32))
                self.inst = out
                self.inst_cap = ocap
            out[otop] = nid
            otop += 1
        return out[0]
