"""Pure-Python twin of the compiled pattern enumeration kernel."""

import numpy as np


def subset_table(n, adj):
    full = 1 << n
    sizes = np.zeros(full, dtype=np.int32)
    oks = np.zeros(full, dtype=np.uint8)
    for s in range(full):
        size = bin(s).count("1")
        deg = 0
        ok = 1
        for i in range(n):
            if (s >> i) & 1:
                nb = bin(adj[i] & s).count("1")
                if nb == 0:
                    ok = 0
                    break
                deg += nb
        if ok and size > 0 and deg // 2 < size - 1:
            ok = 0
        sizes[s] = size
        oks[s] = ok
    return sizes, oks


def feasible_masks(n, K, adj, nu, min_total):
    if n * K > 30:
        raise ValueError("pattern space too large")
    sizes, oks = subset_table(n, adj)
    sz = sizes.tolist()
    okv = oks.tolist()
    low = (1 << n) - 1
    out = []
    for mask in range(1 << (n * K)):
        sets = []
        tot = 0
        nonempty = 0
        good = True
        for c in range(K):
            sc = (mask >> (c * n)) & low
            if not okv[sc]:
                good = False
                break
            sets.append(sc)
            tot += sz[sc]
            if sz[sc]:
                nonempty += 1
        if not good or tot < min_total or (nonempty and nonempty != K):
            continue
        for c in range(K):
            for d in range(c + 1, K):
                ov = bin(sets[c] & sets[d]).count("1")
                if ov > nu * sz[sets[c]] + 1e-9 or ov > nu * sz[sets[d]] + 1e-9:
                    good = False
                    break
            if not good:
                break
        if good:
            out.append(mask)
    return np.asarray(out, dtype=np.uint32)
