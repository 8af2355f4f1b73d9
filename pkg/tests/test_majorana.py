import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fqtk.majorana import (
    GAMMA,
    GAMMA_TILDE,
    MajoranaQubitString,
    OperatorSum,
    canonicalize,
    commutation_class,
    eta_index,
    g,
    gt,
    identity_string,
    jordan_wigner,
    pauli,
    zf_string,
)
from fqtk.sim import Layout, string_matrix, sum_matrix


def test_flattening_is_a_bijection():
    seen = set()
    for site in range(10):
        for kind in (GAMMA, GAMMA_TILDE):
            e = eta_index(site, kind)
            assert e not in seen
            seen.add(e)
            assert (e // 2, e % 2) == (site, kind)
    assert seen == set(range(20))


def test_single_swap_gives_minus_one():
    s = canonicalize([1, 0])
    assert s.phase == -1
    assert s.etas == (0, 1)


def test_repeated_index_cancels():
    s = canonicalize([0, 0])
    assert s == identity_string()
    assert s.phase == 1


def test_three_factor_canonicalization_matches_dense():
    # [eta3, eta0, eta3] with phase +i collapses to a phased single factor
    s = canonicalize([3, 0, 3], phase_pow=1)
    assert s.etas == (0,)
    layout = Layout(n_fermions=2)
    want = 1j * (
        string_matrix(MajoranaQubitString(0, (3,), ()), layout)
        @ string_matrix(MajoranaQubitString(0, (0,), ()), layout)
        @ string_matrix(MajoranaQubitString(0, (3,), ()), layout)
    )
    got = string_matrix(s, layout)
    assert np.max(np.abs(got - want)) < 1e-12


def test_multiply_self_is_identity():
    assert g(1) * g(1) == identity_string()


def test_disjoint_supports_concatenate():
    prod = gt(1) * g(2)
    assert prod.etas == (eta_index(1, GAMMA_TILDE), eta_index(2, GAMMA))
    assert prod.phase == 1


def test_product_matches_dense_on_three_modes():
    a = canonicalize([eta_index(1, GAMMA_TILDE), eta_index(2, GAMMA)], phase_pow=1)
    b = canonicalize([eta_index(2, GAMMA_TILDE), eta_index(0, GAMMA)], phase_pow=1)
    layout = Layout(n_fermions=3)
    want = string_matrix(a, layout) @ string_matrix(b, layout)
    got = string_matrix(a * b, layout)
    assert np.max(np.abs(got - want)) < 1e-12


def test_multiply_by_adjoint_is_identity():
    s = canonicalize([5, 2, 0], phase_pow=3, paulis=[(0, "Y")])
    assert s * s.adjoint() == identity_string()


@pytest.mark.parametrize("a,b,expected", [
    (g(1), gt(1), "anticommutes"),
    (g(1) * gt(1), g(2) * gt(2), "commutes"),
    (pauli("X", 0), pauli("Z", 0), "anticommutes"),
    (pauli("X", 0), pauli("X", 0), "commutes"),
    (g(0) * pauli("Z", 0), gt(1) * pauli("X", 0), "anticommutes"),
])
def test_commutation_examples(a, b, expected):
    assert commutation_class(a, b) == expected


def _random_string(rng, n_modes=3, n_qubits=1):
    etas = sorted(rng.choice(2 * n_modes, size=rng.integers(0, 2 * n_modes + 1),
                             replace=False).tolist())
    paulis = []
    for q in range(n_qubits):
        letter = rng.choice(["I", "X", "Y", "Z"])
        if letter != "I":
            paulis.append((q, str(letter)))
    return MajoranaQubitString(int(rng.integers(0, 4)), tuple(int(e) for e in etas),
                               tuple(paulis))


def test_commutation_consistent_with_products_exhaustively():
    # all strings of weight <= 3 on <= 3 modes plus one qubit letter
    factors = list(range(6))
    strings = []
    for w in range(4):
        for combo in itertools.combinations(factors, w):
            strings.append(MajoranaQubitString(0, combo, ()))
            strings.append(MajoranaQubitString(0, combo, ((0, "Y"),)))
    for a in strings[:40]:
        for b in strings[:40]:
            ab, ba = a * b, b * a
            assert ab.key() == ba.key()
            if commutation_class(a, b) == "commutes":
                assert ab == ba
            else:
                assert ab == ba.scaled(2)


def test_logical_parity_strings_anticommute():
    # seven-factor products on two disjoint blocks
    a = canonicalize([eta_index(i, GAMMA) for i in range(7)])
    b = canonicalize([eta_index(i, GAMMA_TILDE) for i in range(7, 14)])
    assert commutation_class(a, b) == "anticommutes"
    assert a * b == (b * a).scaled(2)


# -- Jordan-Wigner -------------------------------------------------------------


def test_jw_first_mode_has_no_tail():
    p = jordan_wigner(g(0), 1)
    assert p.letters == ((0, "X"),)
    assert p.phase == 1


def test_jw_second_mode_tail():
    p = jordan_wigner(gt(1), 2)
    assert p.letters == ((0, "Z"), (1, "Y"))
    assert p.phase == 1


def test_jw_number_string_sign_fixed_by_dense():
    s = canonicalize([eta_index(0, GAMMA_TILDE), eta_index(0, GAMMA)], phase_pow=1)
    p = jordan_wigner(s, 1)
    assert p.letters == ((0, "Z"),)
    assert p.phase == 1
    # and the parity factor 1 - 2n maps to -Z under this convention
    q = jordan_wigner(zf_string(0), 1)
    assert q.letters == ((0, "Z"),)
    assert q.phase == -1


def test_jw_reproduces_dense_matrices():
    layout = Layout(n_fermions=2)
    for s in (g(0), gt(0), g(1), gt(1), g(0) * gt(1), zf_string(0)):
        p = jordan_wigner(s, 2)
        mats = {"X": np.array([[0, 1], [1, 0]], complex),
                "Y": np.array([[0, -1j], [1j, 0]]),
                "Z": np.diag([1, -1]).astype(complex)}
        m = np.eye(1, dtype=complex)
        letters = dict(p.letters)
        for q in range(2):
            m = np.kron(m, mats.get(letters.get(q, "I"), np.eye(2, dtype=complex)))
        assert np.max(np.abs(p.phase * m - string_matrix(s, layout))) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_jw_is_a_homomorphism(seed):
    rng = np.random.default_rng(seed)
    a, b = _random_string(rng), _random_string(rng)
    lhs = jordan_wigner(a * b, 3, 1)
    rhs = jordan_wigner(a, 3, 1) * jordan_wigner(b, 3, 1)
    assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_adjoint_equals_reversed_factors(seed):
    rng = np.random.default_rng(seed)
    s = _random_string(rng)
    rebuilt = canonicalize(reversed(s.etas), phase_pow=(-s.phase_pow) % 4, paulis=s.paulis)
    assert s.adjoint() == rebuilt


def test_text_round_trip():
    s = canonicalize([eta_index(0, GAMMA), eta_index(2, GAMMA_TILDE)], phase_pow=3,
                     paulis=[(1, "X")])
    text = str(s)
    assert text == "-i * g0 gt2 | X:q1"
    assert MajoranaQubitString.from_text(text) == s
    assert MajoranaQubitString.from_text("1") == identity_string()


def test_operator_sum_merges_terms():
    op = OperatorSum([(0.5, g(0)), (0.5, g(0).scaled(2))])
    assert len(op) == 0
    op2 = OperatorSum([(0.5, g(0)), (0.25, g(0))])
    c, s = op2.single()
    assert abs(c - 0.75) < 1e-14 and s == g(0)


def test_operator_sum_product_against_dense():
    layout = Layout(n_fermions=2)
    a = OperatorSum([(0.3, g(0)), (0.7j, gt(1))])
    b = OperatorSum([(1.0, g(1) * gt(1)), (-0.2, identity_string())])
    want = sum_matrix(a, layout) @ sum_matrix(b, layout)
    got = sum_matrix(a * b, layout)
    assert np.max(np.abs(want - got)) < 1e-12
