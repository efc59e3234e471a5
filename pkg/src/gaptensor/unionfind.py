class DisjointSet:
    """Union-find over ``0..n-1`` with path halving and union by size.

    ``labels()`` maps every element to a dense id, numbered in order of each
    class's smallest member, so the result does not depend on merge order.
    """

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def labels(self) -> tuple[list[int], int]:
        first: dict[int, int] = {}
        out = []
        for x in range(len(self.parent)):
            r = self.find(x)
            if r not in first:
                first[r] = len(first)
            out.append(first[r])
        return out, len(first)
