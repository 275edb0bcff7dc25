"""Independent SplitMix64 graph generator and brute-force alpha.

Writes the DIMACS text that random_graph(n, p, seed) must reproduce and the
independence number found by exhaustive enumeration.
"""
import sys

MASK = (1 << 64) - 1


def splitmix64(seed):
    state = seed & MASK
    while True:
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        yield z ^ (z >> 31)


def random_graph(n, p, seed):
    gen = splitmix64(seed)
    edges = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            u = (next(gen) >> 11) * 2.0**-53
            if u < p:
                edges.append((i, j))
    return edges


def alpha(n, edges):
    adj = [0] * n
    for i, j in edges:
        adj[i - 1] |= 1 << (j - 1)
        adj[j - 1] |= 1 << (i - 1)
    best = 0
    for mask in range(1 << n):
        size = bin(mask).count("1")
        if size <= best:
            continue
        m, ok = mask, True
        while m:
            v = (m & -m).bit_length() - 1
            if adj[v] & mask:
                ok = False
                break
            m &= m - 1
        if ok:
            best = size
    return best


if __name__ == "__main__":
    n, p, seed = int(sys.argv[1]), float(sys.argv[2]), int(sys.argv[3])
    edges = random_graph(n, p, seed)
    with open(sys.argv[4], "w") as f:
        f.write(f"p edge {n} {len(edges)}\n")
        for i, j in edges:
            f.write(f"e {i} {j}\n")
    print("alpha", alpha(n, edges))
