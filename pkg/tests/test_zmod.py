import itertools

from hypothesis import given, strategies as st

from tatekit import zmod

mats = st.lists(st.lists(st.integers(-20, 20), min_size=3, max_size=3), min_size=2, max_size=4)


@given(mats)
def test_smith_is_a_factorization(A):
    U, D, V = zmod.smith(A)
    assert zmod.matmul(zmod.matmul(U, A), V) == D
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    for i in range(len(D)):
        for j in range(len(D[0])):
            if i != j:
                assert D[i][j] == 0
    nz = [abs(d) for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@given(st.lists(st.lists(st.integers(0, 5), min_size=2, max_size=2), min_size=1, max_size=3),
       st.sampled_from([2, 3, 4, 6]))
def test_solution_count_by_brute_force(A, n):
    gens, card = zmod.solve_homogeneous(A, n)
    brute = sum(1 for v in itertools.product(range(n), repeat=2)
                if all(sum(a * x for a, x in zip(r, v)) % n == 0 for r in A))
    assert card == brute
    for g in gens:
        assert all(sum(a * x for a, x in zip(r, g)) % n == 0 for r in A)


@given(st.lists(st.lists(st.integers(0, 7), min_size=2, max_size=2), max_size=3), st.sampled_from([4, 6, 8]))
def test_module_cardinality(gens, n):
    M = zmod.ModuleModN(n, 2, gens)
    span = {tuple(v) for v in M.elements()}
    assert len(span) == M.cardinality
    brute = {(0, 0)}
    frontier = list(brute)
    while frontier:
        v = frontier.pop()
        for g in gens:
            w = ((v[0] + g[0]) % n, (v[1] + g[1]) % n)
            if w not in brute:
                brute.add(w)
                frontier.append(w)
    assert span == brute
    assert all(M.contains(v) for v in brute)
