import numpy as np
import pytest

from hybridhhl.circuit import gen_family
from hybridhhl.hhl import build_hhl
from hybridhhl.metrics import (DegenerateSpectrumError, InsufficientShotsError, TABLE1, circuit_counts,
                               dem_predict, exact_oracle, filter_ancilla, hhl_oracle, quantum_volume,
                               supremacy_table, to_csv, to_markdown, tomography, xeb)
from hybridhhl.metrics.qv import heavy_outputs, qv_circuit
from hybridhhl.metrics.tomography import expected_error, hhl_vector_state, project_psd
from hybridhhl.qstate import DegenerateStateError, DensityMatrix, ProbDist, StateVector, state_fidelity
from hybridhhl.sim import NoiseModel, schrodinger_run
from hybridhhl.transpile import load_topology


def porter_thomas(dim, rng):
    p = rng.exponential(size=dim)
    return ProbDist(p / p.sum())


# ------------------------------------------------------------------ XEB

def test_filter_ancilla():
    p = np.zeros(8)
    p[[1, 3, 7]] = [0.2, 0.3, 0.5]          # ancilla = qubit 0, always 1
    out = filter_ancilla(ProbDist(p), 0)
    assert np.allclose(out.probs, [0.2, 0.3, 0, 0.5])
    assert np.allclose(filter_ancilla(ProbDist.uniform(16), 3).probs, np.full(8, 1 / 8))
    q = np.zeros(8)
    q[[0, 2]] = 0.5
    with pytest.raises(DegenerateStateError):
        filter_ancilla(ProbDist(q), 0)


def test_xeb_limits():
    rng = np.random.default_rng(0)
    pts = [porter_thomas(64, rng) for _ in range(4)]
    assert xeb([(p, p) for p in pts]) == pytest.approx(1.0)
    assert xeb([(ProbDist.uniform(64), p) for p in pts]) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 0.13, 0.5, 0.97])
def test_xeb_mixture_is_linear(alpha):
    rng = np.random.default_rng(1)
    pairs = []
    for _ in range(5):
        pt = porter_thomas(128, rng)
        pairs.append((ProbDist(alpha * pt.probs + (1 - alpha) / 128), pt))
    assert abs(xeb(pairs) - alpha) < 1e-9


def test_xeb_rejects_flat_ideal():
    with pytest.raises(DegenerateSpectrumError):
        xeb([(ProbDist.uniform(8), ProbDist.uniform(8))])


def test_xeb_input_validation():
    with pytest.raises(ValueError):
        xeb([])
    with pytest.raises(ValueError):
        xeb([(ProbDist.uniform(4), ProbDist.uniform(8))])


def test_xeb_sampled_noiseless():
    rng = np.random.default_rng(2)
    pairs = []
    for j in range(20):
        op, _ = gen_family("NTP", 8, j)
        ideal = schrodinger_run(op).probabilities()
        counts = rng.multinomial(10 ** 5, ideal.probs)
        pairs.append((ProbDist.from_counts(counts), ideal))
    assert xeb(pairs) == pytest.approx(1.0, abs=0.05)


# ------------------------------------------------------------------ DEM

def test_dem_zero_rates():
    d = dem_predict({"n": 5, "sq_gates": 40, "cnots": 20}, {"e1": 0, "e2": 0, "er": 0})
    assert (d.f_r, d.f_1qg, d.f_2qg, d.f_xeb) == (1, 1, 1, 1)


def test_dem_product():
    d = dem_predict({"n": 4, "sq_gates": 10, "cnots": 3}, NoiseModel(0.01, 0.05, 0.02))
    assert d.f_xeb == pytest.approx(0.98 ** 4 * 0.99 ** 10 * 0.95 ** 3)
    with pytest.raises(ValueError):
        dem_predict({"n": 1, "sq_gates": 1, "cnots": 1}, {"e1": 1.5, "e2": 0, "er": 0})


def test_circuit_counts():
    op, spec = gen_family("TP2", 3, 0)
    c, _ = build_hhl(op, spec, hybrid=True)
    cc = circuit_counts(c)
    assert cc == {"n": 6, "sq_gates": c.sq_count, "cnots": c.cnot_count}


# ------------------------------------------------------------------ tomography

def test_tomography_of_zero():
    rho = tomography(exact_oracle(StateVector.basis(1)), 1)
    assert np.allclose(rho.elements, [[1, 0], [0, 0]], atol=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_exact_tomography_recovers_state(m):
    rng = np.random.default_rng(m)
    v = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
    psi = StateVector(v / np.linalg.norm(v))
    rho = tomography(exact_oracle(psi), m, psd=False)
    assert np.abs(rho.elements - np.outer(psi.amps, psi.amps.conj())).max() < 1e-12


def test_maximally_mixed_input():
    rho = tomography(exact_oracle(DensityMatrix.maximally_mixed(2)), 2)
    assert np.allclose(rho.elements, np.eye(4) / 4, atol=1e-12)


def test_depolarized_input_with_shots():
    rng = np.random.default_rng(3)
    mixed = DensityMatrix.maximally_mixed(2)
    exact = exact_oracle(mixed)
    rho = tomography(lambda s: rng.multinomial(20000, exact(s)) / 20000, 2, shots=20000)
    assert np.abs(rho.elements - np.eye(4) / 4).max() < 0.03


def test_hhl_tomography_tp1():
    op, spec = gen_family("TP1", 1, 0)
    circ, lay = build_hhl(op, spec, hybrid=True)
    target = hhl_vector_state(circ, lay)
    rho = tomography(hhl_oracle(circ, lay, 8912, rng=0), lay.vector_qubits, shots=8912)
    assert state_fidelity(target, rho) >= 0.99


@pytest.mark.parametrize("method", ["nearest", "clip"])
def test_projection_is_a_state(method):
    rng = np.random.default_rng(4)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = (a + a.conj().T) / 4 + np.eye(4) / 4
    rho = project_psd(h, method)
    w = np.linalg.eigvalsh(rho)
    assert w.min() > -1e-12 and np.trace(rho).real == pytest.approx(1.0)


def test_nearest_projection_is_closest():
    h = np.diag([0.7, 0.5, -0.2]).astype(complex)
    h = np.pad(h, ((0, 1), (0, 1)))
    got = project_psd(h, "nearest")
    assert np.allclose(np.diag(got).real, [0.6, 0.4, 0.0, 0.0])


def test_tomography_guards():
    with pytest.raises(InsufficientShotsError):
        tomography(exact_oracle(StateVector.basis(3)), 3, shots=10)
    with pytest.raises(ValueError):
        tomography(exact_oracle(StateVector.basis(1)), 6)
    assert expected_error(1, 100) == pytest.approx(np.sqrt(3 / 200))


# ------------------------------------------------------------------ quantum volume

def test_heavy_outputs_median_split():
    assert heavy_outputs(np.array([0.1, 0.4, 0.2, 0.3])).tolist() == [False, True, False, True]


def test_qv_circuit_shape():
    c = qv_circuit(4, 0)
    assert c.n_qubits == 4 and c.cnot_count == 4 * 2 * 3


def test_noiseless_volume():
    res = quantum_volume(load_topology("melbourne15"), NoiseModel(), 3, n_circuits=40, trajectories=1)
    assert res.v_q == 8
    assert all(w["mean"] > 0.75 for w in res.widths.values())


def test_readout_destroys_volume():
    res = quantum_volume(load_topology("melbourne15"), NoiseModel(er=0.5), 3, n_circuits=20, trajectories=1)
    assert res.v_q <= 2
    assert all(abs(w["mean"] - 0.5) < 0.01 for w in res.widths.values())


def test_volume_monotone_in_e2():
    cmap = load_topology("melbourne15")
    vols, heavies = [], []
    for e2 in (0.0, 0.03, 0.15):
        res = quantum_volume(cmap, NoiseModel(0.001, e2, 0.0), 3, n_circuits=20, trajectories=40, seed=1)
        vols.append(res.v_q)
        heavies.append(res.widths[3]["mean"])
    assert vols == sorted(vols, reverse=True)
    assert heavies == sorted(heavies, reverse=True)


def test_volume_arguments():
    with pytest.raises(ValueError):
        quantum_volume(None, NoiseModel(), 9)
    with pytest.raises(ValueError):
        quantum_volume(load_topology("line(3)"), NoiseModel(), 4)


# ------------------------------------------------------------------ table

def test_table_rows():
    t = {(r["family"], r["n"], r["qpu"]): r for r in supremacy_table()}
    syc = t[("TP1", 53, "Sycamore")]
    assert syc["f_xeb"] == pytest.approx(1.4e-1 * 1.3e-1 * 7e-3)
    assert 1 / 1.5 <= syc["f_xeb"] / 1.1e-4 <= 1.5
    assert 0.5 <= syc["t_f_s"] / 3600 <= 2
    assert t[("NTP", 53, "Sycamore")]["f_xeb"] == pytest.approx(4.2e-21, rel=0.01)


def test_table_perfect_fidelity():
    row = {"family": "TP1", "n": 20, "qpu": "x", "f_r": 1.0, "f_1qg": 1.0, "f_2qg": 1.0, "t_sfa": 100.0}
    (r,) = supremacy_table([row])
    assert r["t_f_s"] == r["t_sfa_s"] == 100.0


def test_table_from_counts():
    row = {"family": "TP1", "n": 10, "qpu": "x", "t_sfa": "1 hour",
           "counts": {"n": 10, "sq_gates": 100, "cnots": 20}, "rates": {"e1": 0.001, "e2": 0.01, "er": 0.02}}
    (r,) = supremacy_table([row])
    assert r["f_xeb"] == pytest.approx(0.98 ** 10 * 0.999 ** 100 * 0.99 ** 20)


def test_table_renderings():
    t = supremacy_table()
    md = to_markdown(t)
    assert md.count("\n") == len(TABLE1) + 2
    assert "| NTP | 53 | Sycamore |" in md
    assert to_csv(t).splitlines()[0].startswith("family,n,qpu")
