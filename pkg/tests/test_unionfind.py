from hypothesis import given, strategies as st

from gaptensor.unionfind import DisjointSet


def test_labels_follow_smallest_member():
    ds = DisjointSet(5)
    ds.union(4, 1)
    ds.union(3, 2)
    assert ds.labels() == ([0, 1, 2, 2, 1], 3)


@given(st.integers(1, 12).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))))))
def test_labels_independent_of_merge_order(case):
    n, pairs = case
    a, b = DisjointSet(n), DisjointSet(n)
    for x, y in pairs:
        a.union(x, y)
    for x, y in reversed(pairs):
        b.union(y, x)
    assert a.labels() == b.labels()
    labels, count = a.labels()
    assert sorted(set(labels)) == list(range(count))
    for x, y in pairs:
        assert labels[x] == labels[y]
