"""The invariant checks must notice injected faults, not just pass."""

import random
from fractions import Fraction

import trimspan.checks as checks
from trimspan.checks import check_chain_oracle, run_invariants
from trimspan.cylinder import build_cylinder
from trimspan.treegen import caterpillar, caterpillar_chain, chain_metric, circle_space, random_suite
from trimspan.trimming import trimming_sequence


def test_clean_instances():
    for S in [caterpillar(), circle_space(4, 4)] + random_suite(seed=1, count=5):
        report = run_invariants(S, seed=0)
        assert all(v == [] for v in report.values()), report


def test_broken_rho_is_caught(monkeypatch):
    real = checks.rho
    monkeypatch.setattr(checks, "rho", lambda C, a, b: real(C, a, b) + (1 if a != b else 0))
    seq = trimming_sequence(caterpillar())
    found = checks.check_cylinder(build_cylinder(seq), random.Random(0))
    assert any(v["check"] == "rho-restriction" for v in found)


def test_broken_sigma_is_caught(monkeypatch):
    monkeypatch.setattr(checks, "sigma_partial", lambda seq, x, n: Fraction(0))
    found = checks.check_sigma(trimming_sequence(caterpillar()))
    assert any(v["check"] == "sigma-congruent" for v in found)


def test_wrong_chain_weights_are_caught():
    spec = caterpillar_chain()
    seq = trimming_sequence(chain_metric(spec))
    wrong = type(spec)(spec.levels, spec.proj, ({x: 2 for x in "abcdef"}, spec.delta[1]))
    found = check_chain_oracle(wrong, seq)
    assert any(v["check"] == "chain-underline" for v in found)
