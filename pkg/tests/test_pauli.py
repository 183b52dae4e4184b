import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtc.pauli import (
    SymplecticError,
    SeedTransform,
    apply_matrix,
    decode_seed_decimals,
    format_pauli,
    from_symbols,
    gf2_inv,
    gf2_matmul,
    invert_symplectic,
    is_symplectic,
    parse_pauli,
    random_symplectic,
    single_qubit_symplectics,
    symbol_permutation,
    symplectic_form,
    symplectic_from_index,
    symplectic_group_order,
    symplectic_product,
    to_symbols,
    weight,
)

INNER = [4091, 3736, 2097, 1336, 1601, 279, 3093, 502, 1792, 3020, 226, 1100]
OUTER = [1048, 3872, 3485, 2054, 983, 3164, 3145, 1824, 987, 3282, 2505, 1984]


def pauli_vectors(n):
    return st.lists(st.integers(0, 3), min_size=n, max_size=n).map(from_symbols)


def test_symbol_bits_layout():
    assert format_pauli(parse_pauli("IXYZ")) == "IXYZ"
    # Y carries both bits, X only the x half, Z only the z half
    assert parse_pauli("Y").tolist() == [1, 1]
    assert parse_pauli("X").tolist() == [0, 1]
    assert parse_pauli("Z").tolist() == [1, 0]


def test_weight_counts_qubits():
    assert weight(parse_pauli("IXYZI")) == 3
    assert weight(parse_pauli("III")) == 0


def test_single_qubit_commutation():
    X, Y, Z, I = (parse_pauli(c) for c in "XYZI")
    assert symplectic_product(X, Z) == 1
    assert symplectic_product(X, Y) == 1
    assert symplectic_product(Y, Z) == 1
    assert symplectic_product(X, X) == 0
    assert symplectic_product(I, Y) == 0


def test_symplectic_product_length_mismatch():
    with pytest.raises(ValueError):
        symplectic_product(parse_pauli("XX"), parse_pauli("X"))


@given(pauli_vectors(4), pauli_vectors(4))
def test_symplectic_product_symmetric(a, b):
    assert symplectic_product(a, b) == symplectic_product(b, a)


@given(pauli_vectors(3), pauli_vectors(3), pauli_vectors(3))
def test_symplectic_product_bilinear(a, b, c):
    assert symplectic_product(a ^ b, c) == symplectic_product(a, c) ^ symplectic_product(b, c)


@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_random_symplectic_preserves_products(d, s):
    M = random_symplectic(d, np.random.default_rng(s))
    assert is_symplectic(M)
    rng = np.random.default_rng(s + 1)
    a, b = rng.integers(0, 2, (2, 2 * d)).astype(np.uint8)
    assert symplectic_product(apply_matrix(a, M), apply_matrix(b, M)) == symplectic_product(a, b)


@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_inverse_by_form(d, s):
    M = random_symplectic(d, np.random.default_rng(s))
    inv = invert_symplectic(M)
    assert np.array_equal(gf2_matmul(M, inv), np.eye(2 * d, dtype=np.uint8))
    assert np.array_equal(inv, gf2_inv(M))


def test_sp2_has_six_elements_and_closes():
    mats = single_qubit_symplectics()
    keys = {m.tobytes() for m in mats}
    assert len(keys) == 6 == symplectic_group_order(1)
    for a, b in itertools.product(mats, repeat=2):
        assert gf2_matmul(a, b).tobytes() in keys


def test_single_qubit_twists_fix_identity_and_permute():
    perms = [tuple(symbol_permutation(t)) for t in single_qubit_symplectics()]
    assert len(set(perms)) == 6
    for p in perms:
        assert p[0] == 0 and sorted(p) == [0, 1, 2, 3]


@pytest.mark.parametrize("d", [1, 2])
def test_index_sampler_is_a_bijection(d):
    order = symplectic_group_order(d)
    seen = {symplectic_from_index(i, d).tobytes() for i in range(order)}
    assert len(seen) == order
    assert all(is_symplectic(np.frombuffer(k, dtype=np.uint8).reshape(2 * d, 2 * d)) for k in seen)


def test_random_symplectic_uniform_on_sp2():
    # chi-square over the 6 elements of Sp(2)
    from scipy.stats import chisquare

    rng = np.random.default_rng(2024)
    index = {m.tobytes(): i for i, m in enumerate(single_qubit_symplectics())}
    counts = np.zeros(6)
    for _ in range(6000):
        counts[index[random_symplectic(1, rng).tobytes()]] += 1
    assert chisquare(counts).pvalue > 1e-3


def test_random_symplectic_uniform_on_sp4():
    from scipy.stats import chisquare

    rng = np.random.default_rng(7)
    seen = {}
    for _ in range(36000):
        k = random_symplectic(2, rng).tobytes()
        seen[k] = seen.get(k, 0) + 1
    assert len(seen) == 720
    assert chisquare(list(seen.values())).pvalue > 1e-3


def test_is_symplectic_rejects_bad_shapes():
    with pytest.raises(ValueError):
        is_symplectic(np.eye(3, dtype=np.uint8))
    assert not is_symplectic(np.ones((2, 2), dtype=np.uint8))
    assert is_symplectic(symplectic_form(3))


@pytest.mark.parametrize("decimals,kinds", [(INNER, "e,e"), (OUTER, "a,a")])
def test_published_seeds_decode(decimals, kinds):
    s = decode_seed_decimals(decimals, 3, 1, 3, kinds)
    assert s.matrix.shape == (12, 12)
    assert is_symplectic(s.matrix)
    assert s.to_decimals() == decimals
    assert s.rate == pytest.approx(1 / 3)


def test_seed_kinds():
    s = decode_seed_decimals(INNER, 3, 1, 3, "e,e")
    assert s.entanglement_assisted and s.ancilla_kinds == ("e", "e")
    s = decode_seed_decimals(INNER, 3, 1, 3, ["a", "e"])
    assert s.ancilla_kinds == ("a", "e")
    # a single letter applies to every ancilla
    assert decode_seed_decimals(INNER, 3, 1, 3, "e").ancilla_kinds == ("e", "e")
    with pytest.raises(ValueError):
        decode_seed_decimals(INNER, 3, 1, 3, "e,e,e")
    with pytest.raises(ValueError):
        decode_seed_decimals(INNER, 3, 1, 3, "e,q")


def test_seed_rejects_non_symplectic_and_reports_rows():
    bad = list(INNER)
    bad[3] ^= 1
    with pytest.raises(SymplecticError, match="rows"):
        decode_seed_decimals(bad, 3, 1, 3)


def test_seed_rejects_wrong_count():
    with pytest.raises(ValueError):
        decode_seed_decimals(INNER[:11], 3, 1, 3)


def test_column_blocks(opt_inner):
    U = opt_inner.matrix
    assert opt_inner.u_p.shape == (12, 6) and opt_inner.u_m.shape == (12, 6)
    # the two blocks together are U with its columns reordered
    cols = np.concatenate([opt_inner.memory_columns, opt_inner.physical_columns])
    assert sorted(cols.tolist()) == list(range(12))
    assert np.array_equal(np.hstack([opt_inner.u_m, opt_inner.u_p]), U[:, cols])


def test_ls_block_diagnostic(opt_inner, opt_outer):
    assert opt_inner.ls_invertible
    # the published outer seed has a rank-deficient logical/ancilla block
    assert not opt_outer.ls_invertible


def test_seed_immutable(opt_inner):
    with pytest.raises(ValueError):
        opt_inner.matrix[0, 0] ^= 1


def test_to_symbols_rejects_odd():
    with pytest.raises(ValueError):
        to_symbols(np.zeros(3, dtype=np.uint8))


def test_seed_from_matrix_roundtrip():
    M = random_symplectic(3, np.random.default_rng(3))
    s = SeedTransform(2, 1, 1, M, "a")
    assert SeedTransform.from_decimals(s.to_decimals(), 2, 1, 1, "a").matrix.tolist() == M.tolist()


def test_powers_of_two_decode_to_identity():
    decimals = [1 << (11 - i) for i in range(12)]
    s = decode_seed_decimals(decimals, 3, 1, 3)
    assert np.array_equal(s.matrix, np.eye(12, dtype=np.uint8))


def test_decimal_out_of_range():
    with pytest.raises(ValueError):
        decode_seed_decimals([4096] + INNER[1:], 3, 1, 3)


@given(st.integers(0, 2**31))
def test_weight_invariant_under_twists(s):
    rng = np.random.default_rng(s)
    sym = rng.integers(0, 4, 8)
    mats = single_qubit_symplectics()
    out = [symbol_permutation(mats[t])[x] for t, x in zip(rng.integers(0, 6, 8), sym)]
    assert np.count_nonzero(out) == np.count_nonzero(sym)


def test_double_inverse(opt_outer):
    assert np.array_equal(invert_symplectic(invert_symplectic(opt_outer.matrix)), opt_outer.matrix)
