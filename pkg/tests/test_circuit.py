import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridhhl.circuit import (CNOT, Circuit, FAMILIES, Gate, controlled_power, family_spectrum,
                               gen_family, operator_schmidt_rank, simplify, u3_matrix, u3_params,
                               uc_matrix, unitary_of)

CNOT_01 = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]])  # control 0 (LSB), target 1


def dense_kron(mats):
    """Operator with mats[q] on qubit q, qubit 0 least significant."""
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(m, out)
    return out


def test_empty_circuit_is_identity():
    assert np.allclose(unitary_of(Circuit(3)), np.eye(8))


def test_single_cnot_matrix():
    assert np.array_equal(unitary_of(Circuit(2, (Gate.cnot(0, 1),))), CNOT_01)


@settings(max_examples=40, deadline=None)
@given(st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi),
       st.floats(-np.pi, np.pi))
def test_u3_roundtrip(th, ph, la, g):
    m = u3_matrix(th, ph, la, g)
    assert np.allclose(u3_matrix(*u3_params(m)), m, atol=1e-10)


def test_tp1_single_qubit_is_center_alone():
    for seed in range(5):
        op, spec = gen_family("TP1", 1, seed)
        assert len(op.gates) == 1
        assert [str(x) for x in spec.phases] == ["1/8", "3/8"]
        w = np.linalg.eigvals(unitary_of(op))
        phases = sorted(np.round(np.mod(np.angle(w) / (2 * np.pi), 1) * 8).astype(int))
        assert phases == [1, 3]


def test_tp1_is_product_of_gates():
    op, _ = gen_family("TP1", 3, 7)
    assert all(g.kind != CNOT for g in op.gates)
    mats = [np.eye(2, dtype=complex) for _ in range(3)]
    for g in op.gates:
        mats[g.qubits[0]] = g.matrix @ mats[g.qubits[0]]
    assert np.allclose(unitary_of(op), dense_kron(mats), atol=1e-12)


def test_ntp_is_entangling():
    for seed in range(5):
        op, _ = gen_family("NTP", 2, seed)
        assert op.cnot_count >= 1
        assert operator_schmidt_rank(unitary_of(op), 1, 1) > 1


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("n", [2, 3, 4])
def test_family_spectrum_and_square(family, n):
    op, spec = gen_family(family, n, 3)
    u = unitary_of(op)
    assert np.allclose(u.conj().T @ u, np.eye(1 << n), atol=1e-10)
    got = np.mod(np.angle(np.linalg.eigvals(u)) / (2 * np.pi), 1) * 8
    assert set(np.round(got).astype(int)) <= {int(x * 8) for x in spec.phases}
    assert np.allclose(got, np.round(got), atol=1e-8)
    # squaring collapses onto the center qubit: U^2 = Uc^2 (x) I
    uc2 = np.linalg.matrix_power(uc_matrix(op), 2)
    mats = [np.eye(2)] * n
    mats[op.tags.get("uc_qubit", 0)] = uc2
    assert np.allclose(u @ u, dense_kron(mats), atol=1e-10)


def test_family_structure_is_seed_independent():
    a, _ = gen_family("NTP", 4, 1)
    b, _ = gen_family("NTP", 4, 2)
    assert [(g.kind, g.qubits) for g in a.gates] == [(g.kind, g.qubits) for g in b.gates]
    assert not np.allclose(unitary_of(a), unitary_of(b))


def test_seed_determinism():
    a, _ = gen_family("TP2", 3, 11)
    b, _ = gen_family("TP2", 3, 11)
    assert a.to_dict() == b.to_dict()


def test_inverse_composes_to_identity():
    op, _ = gen_family("TP1", 3, 0)
    assert np.allclose(unitary_of(op + op.inverse()), np.eye(8), atol=1e-10)


def test_spectrum_helper():
    assert family_spectrum(1).p_full == 3
    assert len(family_spectrum(3).phases) == 4


def test_bad_inputs():
    with pytest.raises(ValueError):
        gen_family("XYZ", 2, 0)
    with pytest.raises(ValueError):
        gen_family("NTP", 1, 0)
    with pytest.raises(ValueError):
        Circuit(2, (Gate.cnot(0, 2),))
    with pytest.raises(ValueError):
        Gate(CNOT, (1, 1))


def test_controlled_power_collapses_to_two_qubits():
    for fam in FAMILIES:
        op, _ = gen_family(fam, 3, 5)
        c = controlled_power(op, 1, 3)
        assert c.active_qubits() == {3, op.tags.get("uc_qubit", 0)}


@pytest.mark.parametrize("n", [2, 3, 5])
def test_controlled_tp1_base_power_cnot_count(n):
    op, _ = gen_family("TP1", n, 2)
    # each controlled involution takes one CNOT; the controlled Uc takes two
    assert controlled_power(op, 0, n).cnot_count == n + 1


@pytest.mark.parametrize("family,n", [("TP1", 2), ("TP2", 2), ("NTP", 3), ("NTP", 4)])
@pytest.mark.parametrize("s_exp", [0, 1, 2])
def test_controlled_power_block_diagonal(family, n, s_exp):
    op, _ = gen_family(family, n, 9)
    u = np.linalg.matrix_power(unitary_of(op), 1 << s_exp)
    c = unitary_of(controlled_power(op, s_exp, n))
    d = 1 << n
    expect = np.block([[np.eye(d), np.zeros((d, d))], [np.zeros((d, d)), u]])
    assert np.allclose(c, expect, atol=1e-10)


def test_controlled_power_rejects_overlap():
    op, _ = gen_family("TP1", 2, 0)
    with pytest.raises(ValueError):
        controlled_power(op, 0, 1)


def test_simplify_preserves_unitary():
    op, _ = gen_family("NTP", 4, 3)
    c = controlled_power(op, 0, 4)
    s = simplify(c)
    assert len(s.gates) <= len(c.gates)
    a, b = unitary_of(c), unitary_of(s)
    k = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    assert np.allclose(a * (b[k] / a[k]), b, atol=1e-10)


def test_circuit_json_roundtrip():
    op, _ = gen_family("TP2", 3, 1)
    back = Circuit.from_json(op.to_json())
    assert np.allclose(unitary_of(back), unitary_of(op))
