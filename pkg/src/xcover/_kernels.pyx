# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot inner loops.

Contracts mirror ``xcover._kernels_py`` exactly; ``xcover.kernels`` picks
whichever module imports.  Ground sets are capped at 24 bits and hosts at
64 nodes by the callers, so plain C integer bitmasks suffice.
"""

from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memset

BACKEND = "cython"

cdef int _popcount64(unsigned long long x) noexcept:
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c


def cover_optimum(masks, int n, int p):
    """Smallest sub-collection whose union has at least p bits; see fallback."""
    if p <= 0:
        return 0, []
    cdef long long size = 1LL << n
    cdef int m = len(masks)
    cdef unsigned int *cmasks = <unsigned int *> malloc(m * sizeof(unsigned int))
    cdef unsigned char *dp = <unsigned char *> malloc(size)
    cdef int *choice = <int *> malloc(size * sizeof(int))
    cdef unsigned int *pred = <unsigned int *> malloc(size * sizeof(unsigned int))
    if cmasks == NULL or dp == NULL or choice == NULL or pred == NULL:
        free(cmasks); free(dp); free(choice); free(pred)
        raise MemoryError()
    cdef long long mask, nm
    cdef int j, d, best
    cdef long long best_mask
    try:
        for j in range(m):
            cmasks[j] = masks[j]
        memset(dp, 0xFF, size)
        dp[0] = 0
        for mask in range(size):
            d = dp[mask]
            if d == 0xFF:
                continue
            d += 1
            for j in range(m):
                nm = mask | cmasks[j]
                if dp[nm] > d:
                    dp[nm] = <unsigned char> d
                    choice[nm] = j
                    pred[nm] = <unsigned int> mask
        best = 0xFF
        best_mask = -1
        for mask in range(size):
            if dp[mask] < best and _popcount64(<unsigned long long> mask) >= p:
                best = dp[mask]
                best_mask = mask
        if best_mask < 0:
            return None
        chosen = []
        mask = best_mask
        while mask:
            chosen.append(choice[mask])
            mask = pred[mask]
        chosen.reverse()
        return best, chosen
    finally:
        free(cmasks); free(dp); free(choice); free(pred)


def exact_cover_optimum(masks, int n):
    """Smallest pairwise-disjoint partition of the ground set; see fallback."""
    cdef long long size = 1LL << n
    cdef long long full = size - 1
    if full == 0:
        return 0, []
    cdef int m = len(masks)
    cdef unsigned int *cmasks = <unsigned int *> malloc(max(m, 1) * sizeof(unsigned int))
    cdef unsigned char *dp = <unsigned char *> malloc(size)
    cdef int *choice = <int *> malloc(size * sizeof(int))
    if cmasks == NULL or dp == NULL or choice == NULL:
        free(cmasks); free(dp); free(choice)
        raise MemoryError()
    # bucket sets by lowest element so each state scans only relevant sets
    cdef int *bucket_start = <int *> calloc(n + 1, sizeof(int))
    cdef int *bucket_items = <int *> malloc(max(m, 1) * sizeof(int))
    cdef int *fill = <int *> calloc(n + 1, sizeof(int))
    if bucket_start == NULL or bucket_items == NULL or fill == NULL:
        free(cmasks); free(dp); free(choice)
        free(bucket_start); free(bucket_items); free(fill)
        raise MemoryError()
    cdef long long mask
    cdef unsigned int s
    cdef int j, low, best, bj, d, idx
    try:
        for j in range(m):
            cmasks[j] = masks[j]
        for j in range(m):
            s = cmasks[j]
            if s:
                low = _lowbit_index(s)
                bucket_start[low + 1] += 1
        for low in range(n):
            bucket_start[low + 1] += bucket_start[low]
        for j in range(m):
            s = cmasks[j]
            if s:
                low = _lowbit_index(s)
                bucket_items[bucket_start[low] + fill[low]] = j
                fill[low] += 1
        memset(dp, 0xFF, size)
        dp[0] = 0
        for mask in range(1, size):
            low = _lowbit_index(<unsigned int> (mask & (-mask)))
            best = 0xFF
            bj = -1
            for idx in range(bucket_start[low], bucket_start[low] + fill[low]):
                j = bucket_items[idx]
                s = cmasks[j]
                if s & ~mask:
                    continue
                d = dp[mask ^ s]
                if d + 1 < best:
                    best = d + 1
                    bj = j
            if bj >= 0:
                dp[mask] = <unsigned char> best
                choice[mask] = bj
        if dp[full] == 0xFF:
            return None
        chosen = []
        mask = full
        while mask:
            j = choice[mask]
            chosen.append(j)
            mask ^= cmasks[j]
        chosen.reverse()
        return dp[full], chosen
    finally:
        free(cmasks); free(dp); free(choice)
        free(bucket_start); free(bucket_items); free(fill)


cdef int _lowbit_index(unsigned int x) noexcept:
    cdef int i = 0
    while not (x & 1):
        x >>= 1
        i += 1
    return i


def ham_cycle(succ, int n):
    """Directed Hamiltonian cycle anchored at node 0; see fallback."""
    if n < 2:
        return None
    cdef long long size = 1LL << n
    cdef unsigned int *csucc = <unsigned int *> malloc(n * sizeof(unsigned int))
    cdef unsigned int *preds = <unsigned int *> calloc(n, sizeof(unsigned int))
    cdef unsigned int *dp = <unsigned int *> calloc(size, sizeof(unsigned int))
    if csucc == NULL or preds == NULL or dp == NULL:
        free(csucc); free(preds); free(dp)
        raise MemoryError()
    cdef long long mask, pm
    cdef unsigned int ends, ext, e, prev, cand
    cdef int u, v, cur
    try:
        for u in range(n):
            csucc[u] = succ[u]
            e = csucc[u]
            while e:
                v = _lowbit_index(e & (-e))
                e &= e - 1
                preds[v] |= 1u << u
        dp[1] = 1
        for mask in range(1, size, 2):
            ends = dp[mask]
            if not ends:
                continue
            ext = 0
            e = ends
            while e:
                u = _lowbit_index(e & (-e))
                e &= e - 1
                ext |= csucc[u]
            ext &= ~(<unsigned int> mask)
            while ext:
                v = _lowbit_index(ext & (-ext))
                ext &= ext - 1
                dp[mask | (1LL << v)] |= 1u << v
        cand = dp[size - 1] & preds[0]
        if not cand:
            return None
        cur = _lowbit_index(cand & (-cand))
        order = [cur]
        mask = size - 1
        while mask != 1:
            pm = mask ^ (1LL << cur)
            prev = dp[pm] & preds[cur]
            cur = _lowbit_index(prev & (-prev))
            order.append(cur)
            mask = pm
        order.reverse()
        return order
    finally:
        free(csucc); free(preds); free(dp)


def colorful_trial_yes(int k, post_order, parent, orient, out_adj, in_adj, colors):
    """One color-coding trial over a host with at most 64 nodes; see fallback.

    Families are bitsets over the 2^k color subsets, one per (tree node,
    host node) pair.
    """
    cdef int n = len(colors)
    cdef int words = 1 << (k - 6) if k > 6 else 1
    cdef int nmasks = 1 << k
    cdef int root = post_order[k - 1]
    cdef unsigned long long *fam = <unsigned long long *> calloc(k * n * words, sizeof(unsigned long long))
    cdef unsigned long long *poolbuf = <unsigned long long *> malloc(words * sizeof(unsigned long long))
    cdef unsigned long long *accbuf = <unsigned long long *> malloc(words * sizeof(unsigned long long))
    cdef unsigned long long *hout = <unsigned long long *> malloc(max(n, 1) * sizeof(unsigned long long))
    cdef unsigned long long *hin = <unsigned long long *> malloc(max(n, 1) * sizeof(unsigned long long))
    cdef int *corder = <int *> malloc(k * sizeof(int))
    cdef int *cparent = <int *> malloc(k * sizeof(int))
    cdef int *corient = <int *> malloc(k * sizeof(int))
    if (fam == NULL or poolbuf == NULL or accbuf == NULL or hout == NULL
            or hin == NULL or corder == NULL or cparent == NULL or corient == NULL):
        free(fam); free(poolbuf); free(accbuf); free(hout); free(hin)
        free(corder); free(cparent); free(corient)
        raise MemoryError()
    cdef int i, u, w, v, p, o, a, b, wi, alive, any_pool
    cdef unsigned long long ws, word, aw
    cdef unsigned long long *cur
    cdef unsigned long long *dst
    try:
        for u in range(n):
            hout[u] = out_adj[u]
            hin[u] = in_adj[u]
        for i in range(k):
            corder[i] = post_order[i]
            cparent[i] = parent[i]
            corient[i] = orient[i]
        # base family of every (tree node, host u): the singleton color set of u
        for i in range(k):
            for u in range(n):
                b = 1 << colors[u]
                fam[(i * n + u) * words + (b >> 6)] |= 1ULL << (b & 63)
        for i in range(k):
            v = corder[i]
            if v == root:
                break
            p = cparent[v]
            o = corient[v]
            alive = 0
            for u in range(n):
                cur = fam + (p * n + u) * words
                any_pool = 0
                for wi in range(words):
                    if cur[wi]:
                        any_pool = 1
                        break
                if not any_pool:
                    continue
                if o == 1:
                    ws = hout[u]
                elif o == 2:
                    ws = hin[u]
                else:
                    ws = hout[u] | hin[u]
                for wi in range(words):
                    poolbuf[wi] = 0
                while ws:
                    w = _ctz64(ws)
                    ws &= ws - 1
                    dst = fam + (v * n + w) * words
                    for wi in range(words):
                        poolbuf[wi] |= dst[wi]
                for wi in range(words):
                    accbuf[wi] = 0
                for wi in range(words):
                    word = cur[wi]
                    while word:
                        a = (wi << 6) + _ctz64(word)
                        word &= word - 1
                        _scatter_disjoint(poolbuf, accbuf, a, words)
                for wi in range(words):
                    cur[wi] = accbuf[wi]
                    if accbuf[wi]:
                        alive = 1
            if not alive:
                return -1
        for u in range(n):
            if fam[(root * n + u) * words + ((nmasks - 1) >> 6)] & (1ULL << ((nmasks - 1) & 63)):
                return u
        return -1
    finally:
        free(fam); free(poolbuf); free(accbuf); free(hout); free(hin)
        free(corder); free(cparent); free(corient)


cdef int _ctz64(unsigned long long x) noexcept:
    cdef int i = 0
    while not (x & 1):
        x >>= 1
        i += 1
    return i


cdef void _scatter_disjoint(unsigned long long *pool, unsigned long long *acc,
                            int a, int words) noexcept:
    """acc |= { a|b : b in pool, a & b == 0 }."""
    cdef int wi, b, ab
    cdef unsigned long long word
    for wi in range(words):
        word = pool[wi]
        while word:
            b = (wi << 6) + _ctz64(word)
            word &= word - 1
            if a & b:
                continue
            ab = a | b
            acc[ab >> 6] |= 1ULL << (ab & 63)
