"""Tests for measurement simulation, reconstruction, and base-process fits."""

import math
import warnings

import numpy as np
import pytest

from causalmaps import (EPSILON_DEFAULT, NumericalContractError,
                        TomographySetting, bootstrap_errors, family_map,
                        fit_theta, outcome_probabilities, phi_plus,
                        predict_from_base, pseudo_records, read_counts_csv,
                        reconstruct, sample_counts, simulate_records,
                        standard_settings, tomography_report, write_counts_csv)
import oracle

AXIS_VECTORS = {"x": np.array([1.0, 0, 0]),
                "y": np.array([0.0, 1, 0]),
                "z": np.array([0.0, 0, 1])}


def frobenius(a, b):
    return float(np.linalg.norm(a - b))


def test_standard_settings_enumeration():
    settings = standard_settings()
    assert len(settings) == 54
    assert len(set(settings)) == 54
    assert settings[0] == TomographySetting("x", "x+", "x")
    assert settings[-1] == TomographySetting("z", "z-", "z")


def test_setting_validation():
    with pytest.raises(ValueError):
        TomographySetting("w", "x+", "z")
    with pytest.raises(ValueError):
        TomographySetting("x", "x", "z")
    with pytest.raises(ValueError):
        TomographySetting("x", "x+", "q")


def test_outcome_probabilities_match_direct_evolution():
    theta, p, q = 1.1, 0.3, 0.6
    cmap = family_map(theta, p=p, q=q)
    tau = oracle.family_tau(theta, p=p, q=q)
    deph = {"pre_d": (AXIS_VECTORS["y"], p), "pre_e": (AXIS_VECTORS["x"], p),
            "post_b": (AXIS_VECTORS["z"], p)}
    for c, d, b in (("x", "y-", "z"), ("y", "z+", "x"), ("z", "x+", "y")):
        setting = TomographySetting(c, d, b)
        probs = outcome_probabilities(cmap, setting)
        assert abs(sum(probs.values()) - 1.0) < 1e-12
        assert all(v >= 0.0 for v in probs.values())
        rho_d = oracle.eigenstate(AXIS_VECTORS[d[0]], +1 if d[1] == "+" else -1)
        expected = oracle.probability_table(
            tau, AXIS_VECTORS[c], rho_d, AXIS_VECTORS[b],
            oracle.delay_terms(theta, q), oracle.phi_plus(), **deph)
        ours = np.array([probs[o] for o in ((1, 1), (1, -1), (-1, 1), (-1, -1))])
        assert np.abs(ours - expected).max() < 1e-10


def test_sample_counts_deterministic():
    probs = {(1, 1): 0.4, (1, -1): 0.3, (-1, 1): 0.2, (-1, -1): 0.1}
    a = sample_counts(probs, 1000, seed=42)
    b = sample_counts(probs, 1000, seed=42)
    c = sample_counts(probs, 1000, seed=43)
    assert a == b
    assert a != c
    assert sum(a.values()) == 1000


def test_simulate_records_deterministic():
    cmap = family_map(1.2)
    first = simulate_records(cmap, shots=300, seed=9)
    second = simulate_records(cmap, shots=300, seed=9)
    assert first == second
    assert len(first) == 54 * 4
    with pytest.raises(ValueError):
        simulate_records(cmap, shots=0, seed=9)


def test_counts_csv_round_trip(tmp_path):
    cmap = family_map(0.8, p=0.2)
    records = simulate_records(cmap, shots=250, seed=7)
    path = tmp_path / "counts.csv"
    write_counts_csv(records, str(path))
    back = read_counts_csv(str(path))
    assert back == sorted(records, key=type(records[0]).sort_key)

    exact = pseudo_records(cmap)
    write_counts_csv(exact, str(path))
    assert read_counts_csv(str(path)) == sorted(exact, key=type(exact[0]).sort_key)


def test_counts_csv_rejects_malformed_input(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("setting_c,setting_d,b,c,b,count,shots\nx,x+,x,1,1,5,10\n")
    with pytest.raises(ValueError):
        read_counts_csv(str(path))
    path.write_text("setting_c,setting_d,setting_b,c,b,count,shots\nx,x+,x,1,1\n")
    with pytest.raises(ValueError):
        read_counts_csv(str(path))


def test_reconstruct_noiseless_is_exact():
    for cmap in (family_map(1.2),
                 family_map(0.7, p=0.4, q=0.5),
                 family_map(math.pi / 2, p=1.0, eta=0.3)):
        rebuilt = reconstruct(pseudo_records(cmap))
        assert frobenius(rebuilt.tau, cmap.tau) < 1e-9
        assert rebuilt.provenance == "reconstructed"
        assert tuple(rebuilt.layout) == ("C", "B", "D")


def test_reconstruct_error_shrinks_with_shots():
    cmap = family_map(1.2)
    coarse = reconstruct(simulate_records(cmap, shots=1000, seed=11))
    fine = reconstruct(simulate_records(cmap, shots=100000, seed=11))
    assert frobenius(fine.tau, cmap.tau) < frobenius(coarse.tau, cmap.tau)
    assert frobenius(fine.tau, cmap.tau) < 0.02


def test_reconstruct_needs_informationally_complete_settings():
    cmap = family_map(1.2)
    partial = [s for s in standard_settings() if s.c_basis == "x"]
    with pytest.raises(NumericalContractError, match="constrain"):
        reconstruct(pseudo_records(cmap, settings=partial))


def test_fit_theta_recovers_swap_angle():
    for theta in (0.3, 1.2, 2.5):
        result = fit_theta(pseudo_records(family_map(theta)))
        assert abs(result.theta - theta) < 1e-5
        assert result.residual < 1e-12
        assert result.theta_se >= 0.0


def test_fit_theta_is_record_order_invariant():
    records = simulate_records(family_map(0.9), shots=2000, seed=21)
    shuffled = list(records)
    np.random.default_rng(5).shuffle(shuffled)
    assert fit_theta(shuffled).theta == fit_theta(records).theta


def test_predict_from_base_transforms():
    base = pseudo_records(family_map(0.9))
    cases = (
        (dict(q=0.35), family_map(0.9, q=0.35)),
        (dict(p=0.25), family_map(0.9, p=0.25)),
        (dict(p=1.0, eta=0.3), family_map(0.9, p=1.0, eta=0.3)),
        (dict(tau=1.0, tau_coh=2.0), family_map(0.9, q=math.exp(-1.0 / 8))),
    )
    for kwargs, expected in cases:
        pred = predict_from_base(base, **kwargs)
        assert frobenius(pred.map.tau, expected.tau) < 1e-8
        assert abs(pred.theta - 0.9) < 1e-6
        assert pred.residual_rms < 1e-9
    assert frobenius(predict_from_base(base, q=0.35).rho_ce, phi_plus()) < 1e-8


def test_predict_from_base_argument_validation():
    base = pseudo_records(family_map(0.9))
    with pytest.raises(ValueError):
        predict_from_base(base, q=0.5, tau=1.0, tau_coh=1.0)
    with pytest.raises(ValueError):
        predict_from_base(base, tau=1.0)


def test_predict_from_base_warns_far_from_family():
    with pytest.warns(UserWarning, match="residual"):
        predict_from_base(pseudo_records(family_map(math.pi / 2, q=0.0)), q=0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        predict_from_base(pseudo_records(family_map(1.1)), q=0.5)


def test_bootstrap_errors_require_sampled_counts():
    with pytest.raises(ValueError, match="integer"):
        bootstrap_errors(pseudo_records(family_map(1.2)))


def test_bootstrap_errors_shrink_with_shots():
    cmap = family_map(1.2)
    wide = bootstrap_errors(simulate_records(cmap, 1000, seed=1), n_boot=30, seed=1)
    tight = bootstrap_errors(simulate_records(cmap, 100000, seed=1), n_boot=30, seed=1)
    keys = {"c_cd", "neg_bd_plus", "neg_bd_minus", "neg_cb_plus",
            "neg_cb_minus", "neg_cd_plus", "neg_cd_minus"}
    assert set(wide) == keys and set(tight) == keys
    for key in ("c_cd", "neg_cd_plus", "neg_cd_minus"):
        assert tight[key] < wide[key]


def test_tomography_report_exact_records():
    report = tomography_report(pseudo_records(family_map(1.2)))
    assert report["bootstrap_se"] == {}
    assert report["epsilon_effective"] == EPSILON_DEFAULT
    assert report["witnesses"].class_label == "Coh"


def test_tomography_report_raises_threshold_for_sampled_records():
    records = simulate_records(family_map(1.2), shots=3000, seed=4)
    report = tomography_report(records, n_boot=12, seed=4)
    assert report["epsilon_effective"] > EPSILON_DEFAULT
    assert all(v > 0.0 for v in report["bootstrap_se"].values())
    assert report["witnesses"].class_label == "Coh"
    assert report["witnesses"].epsilon == report["epsilon_effective"]
