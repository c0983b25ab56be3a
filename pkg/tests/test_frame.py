import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from silentqec.codes import repetition_code, surface_code
from silentqec.frame import (
    PauliFrame,
    SilentConfig,
    exact_failure_probability,
    inject_silent_failures,
    measure_syndrome,
    occurrence_rate,
    run_shots,
    sample_errors,
    silent_failure_experiment,
    threshold_scan,
)
from silentqec.stats import wilson_interval


@settings(max_examples=40)
@given(st.integers(0, 2**13 - 1), st.integers(0, 2**13 - 1), st.integers(0, 2**13 - 1))
def test_syndrome_is_linear(a, b, c):
    lay = surface_code(3)
    bits = lambda v: np.array([(v >> j) & 1 for j in range(13)], dtype=np.uint8)
    f1 = PauliFrame(bits(a), bits(c))
    f2 = PauliFrame(bits(b), bits(a ^ c))
    f12 = PauliFrame(bits(a ^ b), bits(a))
    s1, s2, s12 = (measure_syndrome(f, lay) for f in (f1, f2, f12))
    np.testing.assert_array_equal(s1 * s2, s12)


def test_silent_checks_report_frozen_value():
    lay = repetition_code(3)
    f = PauliFrame(np.array([1, 0, 0], dtype=np.uint8), np.zeros(3, dtype=np.uint8))
    np.testing.assert_array_equal(measure_syndrome(f, lay), [-1, 1])
    np.testing.assert_array_equal(measure_syndrome(f, lay, silent=[0]), [1, 1])


def test_sample_errors_rate():
    f = sample_errors(PauliFrame.empty(1000), 0.2, np.random.default_rng(0), "XZ")
    assert abs(f.x_flips.mean() - 0.2) < 0.04 and abs(f.z_flips.mean() - 0.2) < 0.04
    g = sample_errors(PauliFrame.empty(50), 0.5, np.random.default_rng(0), "X")
    assert not g.z_flips.any()


@pytest.mark.parametrize("p", [0.02, 0.1])
def test_repetition_exact_oracle(p):
    lay = repetition_code(3)
    assert abs(exact_failure_probability(lay, p) - (3 * p**2 - 2 * p**3)) < 1e-14
    st_ = run_shots(lay, p, shots=40000, seed=5)
    sigma = np.sqrt(st_.p_L_hat * (1 - st_.p_L_hat) / st_.shots)
    assert abs(st_.p_L_hat - (3 * p**2 - 2 * p**3)) < 4 * max(sigma, 1e-4)


def test_wilson_contains_estimate():
    lo, hi = wilson_interval(5, 100)
    assert lo < 0.05 < hi
    assert wilson_interval(0, 10)[0] == 0.0


def test_shots_independent_of_workers():
    lay = surface_code(3)
    a = run_shots(lay, 0.05, 0.02, cycles=3, shots=20000, seed=9, workers=1)
    b = run_shots(lay, 0.05, 0.02, cycles=3, shots=20000, seed=9, workers=4)
    assert a == b


def test_measurement_noise_only_does_not_fail():
    # q > 0 with p = 0: spacetime matching must absorb readout flips
    st_ = run_shots(repetition_code(5), 0.0, 0.02, cycles=4, shots=4000, seed=1)
    assert st_.failures == 0


def test_injection_events():
    lay = repetition_code(9)
    ev = inject_silent_failures(lay, 1.0, 10, np.random.default_rng(0), duration=3)
    assert len(ev) == lay.n_stabilizers
    assert all(0 <= s < 10 and d == 3 for _, s, d in ev)
    assert inject_silent_failures(lay, 0.0, 10, np.random.default_rng(0)) == set()


def test_occurrence_rate():
    rate, hits = occurrence_rate(8, 0.01, 50000, seed=2)
    expect = 1 - 0.99**8
    assert abs(rate - expect) < 4 * np.sqrt(expect * (1 - expect) / 50000)


def test_silent_injection_hurts():
    rows = silent_failure_experiment([5], 0.02, 0.5, cycles=6, shots=4000, seed=0)
    r = rows[0]
    assert r.on.silent_events > 0 and r.off.silent_events == 0
    assert r.on.p_L_hat >= r.off.p_L_hat


def test_silent_config_validation():
    with pytest.raises(ValueError):
        SilentConfig(p_s=1.5)


def test_threshold_scan_ordering_low_p():
    scan = threshold_scan([3, 5], [0.02], shots=20000, seed=4)
    tab = scan.table()
    assert tab[(5, 0.02)].p_L_hat < tab[(3, 0.02)].p_L_hat
