import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from silentqec.codes import repetition_code, surface_code
from silentqec.coherent import (
    SKIPPED,
    ContractViolation,
    NoiseConfig,
    StateVector,
    SyndromeRecord,
    apply_rotation,
    rotated_amplitudes,
    closed_form_deviation,
    logical_error_angle,
    measure_stabilizer,
    no_error_probability,
    noise_round,
    outcome_probability,
    precision_experiment,
    prepare_logical,
    qec_cycle,
    silent_drift_experiment,
    syndrome_branches,
)

angles = st.floats(-np.pi, np.pi, allow_nan=False)
amps = st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 4).filter(lambda v: np.linalg.norm(v) > 1e-3)


def _ab(v):
    v = np.asarray(v) / np.linalg.norm(v)
    return complex(v[0], v[1]), complex(v[2], v[3])


@given(amps, angles, angles, angles)
def test_three_qubit_closed_form(v, t1, t2, t3):
    a, b = _ab(v)
    assert closed_form_deviation(a, b, (t1, t2, t3)) < 1e-12


@settings(max_examples=30)
@given(amps, st.lists(angles, min_size=5, max_size=5))
def test_rotations_preserve_norm(v, thetas):
    a, b = _ab(v)
    s = prepare_logical(repetition_code(5), a, b)
    for q, t in enumerate(thetas):
        s = apply_rotation(s, q, t)
    assert abs(s.norm() - 1) < 1e-12


@settings(max_examples=30)
@given(amps, angles, st.sampled_from([1, -1]))
def test_projection_idempotent(v, t, outcome):
    lay = repetition_code(3)
    s = apply_rotation(prepare_logical(lay, *_ab(v)), 1, t)
    g = lay.stabilizers[0]
    if outcome_probability(s, g, outcome) < 1e-9:
        return
    o1, s1 = measure_stabilizer(s, g, outcome=outcome)
    o2, s2 = measure_stabilizer(s1, g, rng=np.random.default_rng(0))
    assert o1 == o2 == outcome
    np.testing.assert_allclose(s1.amplitudes, s2.amplitudes, atol=1e-12)


def test_forced_impossible_outcome_violates_contract():
    lay = repetition_code(3)
    s = prepare_logical(lay, 1, 0)
    with pytest.raises(ContractViolation):
        measure_stabilizer(s, lay.stabilizers[0], outcome=-1)


def test_no_error_branch_probability():
    lay = repetition_code(3)
    a = b = 1 / np.sqrt(2)
    th = (0.3, 0.3, 0.3)
    s = prepare_logical(lay, a, b)
    for q, t in enumerate(th):
        s = apply_rotation(s, q, t)
    br = syndrome_branches(s, lay)
    assert abs(sum(p for _, p, _ in br) - 1) < 1e-12
    p00 = dict((o, p) for o, p, _ in br)[(1, 1)]
    assert abs(p00 - no_error_probability(a, b, th)) < 1e-12
    c, sn = np.cos(0.15), np.sin(0.15)
    assert abs(p00 - (abs(a * c**3 - b * sn**3) ** 2 + abs(a * sn**3 + b * c**3) ** 2)) < 1e-12


@pytest.mark.parametrize("lay", [repetition_code(3), surface_code(3)], ids=["rep3", "surf3"])
def test_circuit_readout_matches_ideal(lay):
    rng = np.random.default_rng(1)
    s = prepare_logical(lay, 0.6, 0.8)
    s = noise_round(s, lay, NoiseConfig(eta=0.4, angle_mode="uniform"), rng)
    for i, g in enumerate(lay.stabilizers):
        for outcome in (1, -1):
            p = outcome_probability(s, g, outcome)
            if p < 1e-9:
                continue
            _, ideal = measure_stabilizer(s, g, "ideal", outcome=outcome)
            _, circ = measure_stabilizer(s, g, "circuit", layout=lay, outcome=outcome)
            np.testing.assert_allclose(circ.amplitudes, ideal.amplitudes, atol=1e-10)


def test_eta_l_exact_rotation():
    lay = repetition_code(3)
    zero = prepare_logical(lay, 1, 0).amplitudes
    one = prepare_logical(lay, 0, 1).amplitudes
    th = 0.37
    s = StateVector(3, np.cos(th / 2) * zero + 1j * np.sin(th / 2) * one)
    assert abs(logical_error_angle(s, lay, 1, 0) - th) < 1e-12


def test_eta_l_rejects_leakage():
    lay = repetition_code(3)
    s = apply_rotation(prepare_logical(lay, 1, 0), 0, 0.3)
    with pytest.raises(ContractViolation):
        logical_error_angle(s, lay, 1, 0)


def test_skipped_checks_are_frozen():
    lay = repetition_code(3)
    rec = SyndromeRecord(lay.n_stabilizers)
    rec.append([-1, 1])
    rec.append([SKIPPED, 1])
    np.testing.assert_array_equal(rec.reported()[-1], [-1, 1])
    np.testing.assert_array_equal(rec.skipped()[-1], [True, False])
    row, _ = qec_cycle(prepare_logical(lay, 1, 0), lay, skip=[1], rng=np.random.default_rng(0))
    assert row[1] == SKIPPED


def test_single_cycle_branch_laws():
    lay = repetition_code(3)
    eta = 0.1
    st_ = precision_experiment(lay, NoiseConfig(eta=eta), shots=4000, seed=3)
    b0, b1 = st_.branch(0), st_.branch(1)
    assert abs(b0.mean_eta_l - eta**3 / 4) / (eta**3 / 4) < 0.05
    assert abs(b1.mean_eta_l - eta) < 1e-9
    assert b0.count + b1.count == 4000


def test_precision_independent_of_workers():
    lay = repetition_code(3)
    cfg = NoiseConfig(eta=0.3, angle_mode="uniform")
    a = precision_experiment(lay, cfg, cycles=2, shots=5000, seed=11, workers=1, keep_rows=True)
    b = precision_experiment(lay, cfg, cycles=2, shots=5000, seed=11, workers=3, keep_rows=True)
    assert a.rows == b.rows


def test_drift_grows_and_control_bounded():
    lay = repetition_code(5)
    cur = silent_drift_experiment(lay, NoiseConfig(eta=0.05), T=20, silent=1, shots=200, seed=0)
    occ = cur.branch_occupation[:-1]
    assert np.all(np.diff(occ) > 0)
    assert np.max(cur.control_occupation) < 2 * 0.05**2


def test_closed_form_basis_states():
    amp = rotated_amplitudes(1, 0, (0, 0, 0))
    assert amp[0] == 1 and np.all(amp[1:] == 0)
