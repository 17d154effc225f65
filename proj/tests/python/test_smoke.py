#
# Copyright 2026 The stability-kit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

import pytest

import stability_kit as sk


def test_tape_is_deterministic():
    a = sk.RandomTape("0a").derive([1, 2])
    b = sk.RandomTape("0a").derive_one(1).derive_one(2)
    assert a == b
    assert a.block(0) == b.block(0)
    assert sk.RandomTape("0b").derive([1, 2]).block(0) != a.block(0)


def test_consistent_sample_shares_tape():
    p = [(1, 0.5), (2, 0.5)]
    tape = sk.RandomTape("1").derive([3])
    assert sk.consistent_sample(p, tape) == sk.consistent_sample(p, tape)
    assert sk.tv_distance(p, [(1, 0.25), (2, 0.75)]) == pytest.approx(0.25)


def test_corr_samp_lands_in_image():
    table = [0, 1, 1, 3, 0, 1, 1, 3]
    image = {y for y, _ in sk.induced_distribution(3, 2, table)}
    hits = [sk.corr_samp(3, 2, table, 0.1, sk.RandomTape("2").derive([i])) for i in range(20)]
    assert all(h is None or h in image for h in hits)
    assert sum(h is not None for h in hits) >= 15


def test_learner_finds_target():
    rows = ["0000", "0011", "1111"]
    sample = [(x, int(rows[1][x])) for x in range(4)] * 50
    h = sk.r_finite_learn(rows, sample, 0.3, 0.3, 0.1, True, sk.RandomTape("3"))
    assert h == 1
    assert sk.learner_sample_size(0.2, 0.2, 0.1, True, 32) == 3777


def test_gm_round_trip():
    n, x, p, q = sk.gm_keygen(16, sk.RandomTape("4"))
    assert n == p * q
    for i, bit in enumerate([0, 1, 1, 0]):
        c = sk.gm_enc(n, x, bit, sk.RandomTape("5").derive([i]))
        assert sk.gm_dec(p, q, c) == bit
    assert sk.gm_dec(p, q, p) is None


def test_selection_on_a_clear_winner():
    out = sk.dp_selection([7] * 40 + [3], 1.0, 0.05, sk.RandomTape("6"))
    assert out == 7
    assert sk.dp_selection([7], 1.0, 0.05, sk.RandomTape("6")) is None


def test_run_suite_and_errors():
    assert "verify-all" in sk.suites()
    report, passed, warnings = sk.run_suite(
        {"suite": "crypto-sep", "prime_bits": 12, "trials": 20, "extra": 1})
    assert passed
    assert "advantage" in report["metrics"]
    assert warnings == ["unknown key 'extra' ignored"]
    with pytest.raises(ValueError, match="rho"):
        sk.run_suite({"suite": "learn-finite", "rho": 1.5})
