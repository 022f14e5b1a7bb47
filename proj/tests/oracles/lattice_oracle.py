"""Independent oracle for frozen test values.

Builds the side-n hexagon on a triangular lattice with plain Python, enumerates
lozenge tilings as perfect matchings of the triangle adjacency graph, and
derives height functions from the matchings. Shares only conventions (indexing,
edge orientation) with the C++ library, not code.

Run: python3 tests/oracles/lattice_oracle.py
"""
from fractions import Fraction
from itertools import product
from collections import deque
import sys


def cardinality(a, b, c):
    t = Fraction(1)
    for i in range(1, a + 1):
        for j in range(1, b + 1):
            for g in range(1, c + 1):
                t *= Fraction(i + j + g - 1, i + j + g - 2)
    assert t.denominator == 1
    return t.numerator


def hexagon(n):
    # vertices in doubled-x coordinates (X, j), row j in [-n, n]
    verts = []
    for j in range(-n, n + 1):
        w = 2 * n - abs(j)
        for X in range(-w, w + 1, 2):
            verts.append((X, j))
    vset = set(verts)
    tris = []  # (centroidX2, j_strip, up, (v0, v1, v2))
    for j in range(-n, n):
        for (X, jj) in verts:
            if jj != j:
                continue
            # up triangle with bottom-left corner at (X, j)
            up = ((X, j), (X + 2, j), (X + 1, j + 1))
            if all(p in vset for p in up):
                tris.append((X + 1, j, True, up))
        for (X, jj) in verts:
            if jj != j + 1:
                continue
            dn = ((X, j + 1), (X + 2, j + 1), (X + 1, j))
            if all(p in vset for p in dn):
                tris.append((X + 1, j, False, dn))
    tris.sort(key=lambda t: (t[1], t[0]))
    # boundary vertices: incident to an edge that belongs to one triangle
    edge_count = {}
    for t in tris:
        a, b, c = t[3]
        for e in ((a, b), (b, c), (c, a)):
            k = frozenset(e)
            edge_count[k] = edge_count.get(k, 0) + 1
    boundary = set()
    for k, cnt in edge_count.items():
        if cnt == 1:
            boundary |= set(k)
    internal = sorted([v for v in verts if v not in boundary], key=lambda p: (p[1], p[0]))
    return verts, tris, internal, boundary, edge_count


def oriented(a, b):
    """True if the lattice orientation points a -> b (directions 0, 120, 240 deg)."""
    dX, dj = b[0] - a[0], b[1] - a[1]
    return (dX, dj) in ((2, 0), (-1, 1), (-1, -1))


def boundary_walk(n, boundary):
    # clockwise from bottom-left (-n, -n)
    start = (-n, -n)
    dirs = [(-1, 1)] * n + [(1, 1)] * n + [(2, 0)] * n + [(1, -1)] * n + [(-1, -1)] * n + [(-2, 0)] * n
    walk = [start]
    h = [0]
    p = start
    for d in dirs:
        q = (p[0] + d[0], p[1] + d[1])
        assert q in boundary
        h.append(h[-1] + (1 if oriented(p, q) else -1))
        walk.append(q)
        p = q
    assert walk[-1] == start and h[-1] == 0
    return walk[:-1], h[:-1]


def matchings(tris):
    adj = {i: [] for i in range(len(tris))}
    for i, ti in enumerate(tris):
        for k, tk in enumerate(tris):
            if i < k and len(set(ti[3]) & set(tk[3])) == 2:
                adj[i].append(k)
                adj[k].append(i)
    out = []
    mate = [-1] * len(tris)

    def rec():
        try:
            i = mate.index(-1)
        except ValueError:
            out.append(tuple(mate))
            return
        for k in adj[i]:
            if mate[k] == -1:
                mate[i], mate[k] = k, i
                rec()
                mate[i] = mate[k] = -1
    rec()
    return out


def heights_from_matching(n, tris, mate, walk, hb):
    h = dict(zip(walk, hb))
    covered = set()
    for i, k in enumerate(mate):
        shared = frozenset(set(tris[i][3]) & set(tris[k][3]))
        covered.add(shared)
    nbrs = {}
    for t in tris:
        a, b, c = t[3]
        for x, y in ((a, b), (b, c), (c, a)):
            nbrs.setdefault(x, set()).add(y)
            nbrs.setdefault(y, set()).add(x)
    q = deque(walk)
    while q:
        u = q.popleft()
        for v in nbrs[u]:
            step = -2 if frozenset((u, v)) in covered else 1
            val = h[u] + step if oriented(u, v) else h[u] - step
            if v in h:
                assert h[v] == val, "inconsistent"
            else:
                h[v] = val
                q.append(v)
    return h


def depths(internal, boundary, tris):
    nbrs = {}
    for t in tris:
        a, b, c = t[3]
        for x, y in ((a, b), (b, c), (c, a)):
            nbrs.setdefault(x, set()).add(y)
            nbrs.setdefault(y, set()).add(x)
    d = {v: 0 for v in boundary}
    q = deque(boundary)
    while q:
        u = q.popleft()
        for v in nbrs[u]:
            if v not in d:
                d[v] = d[u] + 1
                q.append(v)
    return [d[v] for v in internal]


def main():
    for s in [(1, 1, 1), (2, 2, 2), (3, 3, 3), (4, 4, 4), (5, 5, 5), (6, 6, 6), (7, 7, 7), (10, 10, 10), (1, 2, 3)]:
        print("T", s, cardinality(*s))
    for n in (1, 2, 3):
        verts, tris, internal, boundary, _ = hexagon(n)
        walk, hb = boundary_walk(n, boundary)
        print(f"n={n} N={len(tris)} L={len(internal)} M={len(walk)}")
        print(" boundary heights", hb)
        print(" depths", depths(internal, boundary, tris))
        ms = matchings(tris)
        print(" matchings", len(ms))
        hs = [tuple(heights_from_matching(n, tris, m, walk, hb)[v] for v in internal) for m in ms]
        hmin = tuple(min(h[l] for h in hs) for l in range(len(internal)))
        hmax = tuple(max(h[l] for h in hs) for l in range(len(internal)))
        print(" hmin", hmin, "attained", hmin in hs)
        print(" hmax", hmax, "attained", hmax in hs)
        words = sorted(tuple((a - b) // 3 for a, b in zip(h, hmin)) for h in hs)
        assert all((a - b) % 3 == 0 for h in hs for a, b in zip(h, hmin))
        if n == 2:
            print(" words (lex order):")
            for w in words:
                print("  ", w)
        # tile orientation census of the min tiling
        imin = hs.index(hmin)
        m = ms[imin]
        census = {"V": 0, "L": 0, "R": 0}
        for i, k in enumerate(m):
            if i < k:
                a, b = tris[i][3], tris[k][3]
                sh = sorted(set(a) & set(b), key=lambda p: p[0])
                d = (sh[1][0] - sh[0][0], sh[1][1] - sh[0][1])
                census["V" if d[1] == 0 else ("R" if d[1] < 0 else "L")] += 1
        print(" min tiling census", census)


if __name__ == "__main__":
    main()
