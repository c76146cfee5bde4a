import math

import numpy as np
import pytest

from tribell.qalg import NotUnitTraceError, validate_density
from tribell.states import (
    StateFamily,
    ad_apply,
    ad_ghz,
    ad_kraus,
    build_state,
    ghz,
    load_state,
    noisy_ghz,
    psi_pi8_state,
    save_state,
)

from _support import random_density


class TestGhz:
    def test_corner_entries(self):
        g = ghz()
        assert g[0, 0] == 0.5
        assert g[0, 7] == 0.5

    def test_purity(self):
        g = ghz()
        assert np.trace(g @ g).real == pytest.approx(1.0, abs=1e-15)

    def test_valid(self):
        validate_density(ghz())


class TestNoisyGhz:
    def test_p_one_is_ghz(self):
        assert np.array_equal(noisy_ghz(1.0), ghz())

    def test_p_zero_is_block_mix(self):
        expected = np.diag([1, 0, 0, 1, 1, 0, 0, 1]).astype(complex) / 4
        assert np.allclose(noisy_ghz(0.0), expected, atol=1e-15)

    def test_half_is_valid_state(self):
        rho = noisy_ghz(0.5)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.eigvalsh(rho)[0] >= -1e-12

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            noisy_ghz(1.5)

    def test_grid_valid(self):
        for p in np.linspace(0, 1, 11):
            validate_density(noisy_ghz(p))


class TestPsiPi8:
    def test_pure_corner_entry(self):
        rho = psi_pi8_state(1.0)
        assert rho[0, 7].real == pytest.approx(math.sqrt(2) / 4, abs=1e-15)

    def test_p_zero_background(self):
        expected = np.zeros((8, 8), dtype=complex)
        expected[0, 0] = expected[1, 1] = 0.5
        assert np.allclose(psi_pi8_state(0.0), expected, atol=1e-15)

    def test_half_trace(self):
        assert np.trace(psi_pi8_state(0.5)).real == pytest.approx(1.0, abs=1e-12)

    def test_grid_valid(self):
        for p in np.linspace(0, 1, 11):
            validate_density(psi_pi8_state(p))


class TestAmplitudeDamping:
    def test_kraus_completeness(self):
        for gamma in np.linspace(0, 1, 11):
            e0, e1 = ad_kraus(gamma)
            total = e0.conj().T @ e0 + e1.conj().T @ e1
            assert np.max(np.abs(total - np.eye(2))) < 1e-15

    def test_zero_rate_is_identity_map(self):
        rng = np.random.default_rng(21)
        rho = random_density(rng)
        assert np.allclose(ad_apply(rho, 0.0), rho, atol=1e-14)

    def test_full_damping_sends_to_000(self):
        rng = np.random.default_rng(22)
        rho = random_density(rng)
        out = ad_apply(rho, 1.0)
        expected = np.zeros((8, 8), dtype=complex)
        expected[0, 0] = 1.0
        assert np.max(np.abs(out - expected)) < 1e-12

    def test_preserves_trace_and_psd(self):
        rng = np.random.default_rng(23)
        for gamma in (0.1, 0.4, 0.8):
            rho = random_density(rng)
            out = ad_apply(rho, gamma)
            assert np.trace(out).real == pytest.approx(1.0, abs=1e-12)
            assert np.linalg.eigvalsh(out)[0] >= -1e-12

    def test_channel_matches_closed_form_on_grid(self):
        for gamma in np.linspace(0.0, 1.0, 11):
            diff = np.max(np.abs(ad_apply(ghz(), gamma) - ad_ghz(gamma)))
            assert diff < 1e-12

    def test_closed_form_entries(self):
        rho = ad_ghz(0.5)
        assert rho[0, 0].real == pytest.approx(0.5625, abs=1e-15)
        assert rho[0, 7].real == pytest.approx(0.5**1.5 / 2, abs=1e-15)
        assert np.array_equal(ad_ghz(0.0), ghz())

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            ad_ghz(-0.1)


class TestStateFiles:
    def test_round_trip_bit_identical(self, tmp_path):
        path = tmp_path / "ghz.json"
        save_state(ghz(), path)
        loaded = load_state(path)
        assert np.array_equal(loaded, ghz())

    def test_round_trip_random(self, tmp_path):
        rng = np.random.default_rng(31)
        rho = random_density(rng)
        path = tmp_path / "state.json"
        save_state(rho, path)
        assert np.array_equal(load_state(path), rho)

    def test_maximally_mixed_file(self, tmp_path):
        path = tmp_path / "mixed.json"
        save_state(np.eye(8, dtype=complex) / 8, path)
        assert np.allclose(load_state(path), np.eye(8) / 8)

    def test_trace_two_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        save_state(np.eye(8, dtype=complex) / 4, path)
        with pytest.raises(NotUnitTraceError):
            load_state(path)

    def test_malformed_json_rejected(self, tmp_path):
        path = tmp_path / "garbage.json"
        path.write_text("not json", encoding="utf-8")
        with pytest.raises(ValueError):
            load_state(path)

    def test_wrong_shape_rejected(self, tmp_path):
        path = tmp_path / "short.json"
        path.write_text('{"dim": 8, "matrix": [[[1,0]]]}', encoding="utf-8")
        with pytest.raises(ValueError):
            load_state(path)


class TestStateFamily:
    def test_builds_each_family(self):
        assert np.array_equal(build_state(StateFamily("ghz")), ghz())
        assert np.array_equal(
            build_state(StateFamily("noisy-ghz", param=0.3)), noisy_ghz(0.3)
        )
        assert np.array_equal(
            build_state(StateFamily("psi-pi8", param=0.3)), psi_pi8_state(0.3)
        )
        assert np.array_equal(
            build_state(StateFamily("ad-ghz", param=0.3)), ad_ghz(0.3)
        )

    def test_file_family(self, tmp_path):
        path = tmp_path / "s.json"
        save_state(ghz(), path)
        assert np.array_equal(build_state(StateFamily("file", path=str(path))), ghz())

    def test_unknown_family_rejected(self):
        with pytest.raises(ValueError):
            StateFamily("w-state")

    def test_missing_param_rejected(self):
        with pytest.raises(ValueError):
            StateFamily("noisy-ghz")
