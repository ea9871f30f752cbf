"""
Acceptance criteria. Each test records one PASS/FAIL line, printed in the
pytest terminal summary under "acceptance criteria".
"""
import csv
import io

import numpy as np
import pytest

from conjoint import catalog
from conjoint.cli import cmd_joint, cmd_retrodict
from conjoint.model import Scenario, assemble_complete_state
from conjoint.oracle import enumerate_joint, sample_joint, tv_distance
from conjoint.probability import (
    Direction,
    bayes_check,
    coefficient_matrix,
    conditional,
    conventional_conditional,
    conventional_mixture,
    divergence_report,
    joint_distribution,
    reduced_density,
)
from conjoint.randomized import random_scenario
from conjoint.scenario_io import parse_scenario, write_scenario

TRIALS = 200
EXACT_TOL = 1e-10
WITNESS_TOL = 1e-12
CSV_TOL = 1e-12
SAMPLER_SEED = 20261016
SAMPLER_TV_BOUND = 0.005
CONVERGENCE_RATIO = 3.0


@pytest.fixture(scope="module")
def local_scenarios():
    """200 Local scenarios with dimensions in 2..6 and standard bases."""
    rng = np.random.default_rng(1001)
    return [random_scenario(rng, int(rng.integers(2, 7)), int(rng.integers(2, 7))) for _ in range(TRIALS)]


@pytest.fixture(scope="module")
def mixed_scenarios():
    """200 scenarios, half with a joint evolution, a third with random bases."""
    rng = np.random.default_rng(2002)
    return [
        random_scenario(rng, int(rng.integers(2, 7)), int(rng.integers(2, 7)), joint=k % 2 == 1, random_bases=k % 3 == 0)
        for k in range(TRIALS)
    ]


def complete_joint(s: Scenario):
    return joint_distribution(assemble_complete_state(s.preparation), s.evolution, s.basis_a, s.basis_b)


def record(log, label, passed, detail):
    log.append((label, bool(passed), detail))
    print(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
    assert passed, f"{label}: {detail}"


def test_1_conventional_complete_equivalence(local_scenarios, acceptance_log):
    worst_tv = worst_cond = 0.0
    for s in local_scenarios:
        worst_tv = max(worst_tv, divergence_report(s).total_variation)
        predictive = conditional(complete_joint(s), Direction.PREDICTIVE)
        born = conventional_conditional(s.preparation, s.evolution, s.basis_b)
        rows = predictive.supported
        worst_cond = max(worst_cond, float(np.max(np.abs(predictive.p[rows] - born.p[rows]))))
    record(acceptance_log, "1 equivalence", worst_tv < EXACT_TOL and worst_cond <= EXACT_TOL,
           f"max tv {worst_tv:.2e}, max |p(b|a) - born| {worst_cond:.2e} over {TRIALS} (tol {EXACT_TOL:g})")


def test_2_mu_identities(local_scenarios, acceptance_log):
    worst_row = worst_total = 0.0
    for s in local_scenarios:
        mu_sq = np.abs(coefficient_matrix(s.preparation, s.evolution, s.basis_b).mu) ** 2
        worst_row = max(worst_row, float(np.max(np.abs(mu_sq.sum(axis=1) - np.abs(s.preparation.amplitudes) ** 2))))
        worst_total = max(worst_total, abs(float(mu_sq.sum()) - 1))
    record(acceptance_log, "2 mu identities", worst_row <= EXACT_TOL and worst_total <= EXACT_TOL,
           f"max row residual {worst_row:.2e}, max total residual {worst_total:.2e}")


def test_3_reduction_identity(local_scenarios, acceptance_log):
    worst = 0.0
    non_orthogonal = 0
    for s in local_scenarios:
        prep = s.preparation
        gap = conventional_mixture(prep) - reduced_density(assemble_complete_state(prep), "A")
        worst = max(worst, float(np.max(np.abs(gap))))
        chis = np.hstack(prep.conditional_states)
        overlaps = np.abs(chis.conj().T @ chis - np.eye(prep.dim_a))
        non_orthogonal += bool(overlaps.max() > 0.1)
    record(acceptance_log, "3 reduction identity", worst <= EXACT_TOL and non_orthogonal > 0,
           f"max entry gap {worst:.2e}; {non_orthogonal}/{TRIALS} with non-orthogonal conditional states")


def test_4_oracle_equivalence(mixed_scenarios, acceptance_log):
    worst = 0.0
    joints = sum(not s.evolution.is_local for s in mixed_scenarios)
    for s in mixed_scenarios:
        worst = max(worst, float(np.max(np.abs(enumerate_joint(s).p - complete_joint(s).p))))
    record(acceptance_log, "4 oracle equivalence", worst <= EXACT_TOL and joints > 0,
           f"max |enumerate - engine| {worst:.2e} over {TRIALS} ({joints} joint)")


def test_5_bayes_symmetry(local_scenarios, mixed_scenarios, acceptance_log):
    tables = [complete_joint(s) for s in local_scenarios + mixed_scenarios]
    tables += [enumerate_joint(catalog.build(name).scenario) for name in catalog.FIXTURE_NAMES]
    failures = sum(not bayes_check(t) for t in tables)
    record(acceptance_log, "5 bayes symmetry", failures == 0, f"{failures} failures over {len(tables)} tables")


def test_6_divergence_witness(acceptance_log):
    cnot = catalog.build("cnot-interaction").scenario
    tv_cnot = divergence_report(cnot).total_variation
    retro = conditional(complete_joint(cnot), Direction.RETRODICTIVE)
    masked = bool(retro.masked[1]) and not retro.masked[0]
    cli_masked = "p(B=1) = 0" in cmd_retrodict(str(catalog.fixture_path("cnot-interaction"))).rendered
    tv_embedded = divergence_report(catalog.build("embedded-local-joint").scenario).total_variation
    passed = abs(tv_cnot - 0.5) <= WITNESS_TOL and masked and cli_masked and tv_embedded < EXACT_TOL
    record(acceptance_log, "6 divergence witness", passed,
           f"cnot tv {tv_cnot:.15f}, b=1 masked {masked}, embedded tv {tv_embedded:.2e}")


def test_7_sampler_convergence(acceptance_log):
    s = catalog.build("bell").scenario
    exact = enumerate_joint(s)
    tv_committed = tv_distance(sample_joint(s, 10**6, SAMPLER_SEED).empirical(), exact)
    seeds = range(SAMPLER_SEED, SAMPLER_SEED + 20)
    small = np.median([tv_distance(sample_joint(s, 10**4, k).frequencies, exact) for k in seeds])
    large = np.median([tv_distance(sample_joint(s, 10**6, k).frequencies, exact) for k in seeds])
    passed = tv_committed <= SAMPLER_TV_BOUND and small > CONVERGENCE_RATIO * large
    record(acceptance_log, "7 sampler convergence", passed,
           f"tv(n=1e6, seed {SAMPLER_SEED}) {tv_committed:.2e}; median tv 1e4 {small:.2e} vs 1e6 {large:.2e} "
           f"(ratio {small / large:.1f})")


def test_8_io_fidelity(acceptance_log):
    round_trips = [write_scenario(parse_scenario(raw)) == raw
                   for raw in (catalog.fixture_path(n).read_bytes() for n in catalog.FIXTURE_NAMES)]
    worst = 0.0
    for name in catalog.FIXTURE_NAMES:
        jt = complete_joint(catalog.build(name).scenario)
        out = cmd_joint(str(catalog.fixture_path(name)), fmt="csv")
        parsed = np.full(jt.shape, np.nan)
        for row in csv.DictReader(io.StringIO(out.rendered)):
            if row["quantity"] == "joint":
                parsed[int(row["a"]), int(row["b"])] = float(row["value"])
        worst = max(worst, float(np.max(np.abs(parsed - jt.p))))
    passed = all(round_trips) and worst <= CSV_TOL
    record(acceptance_log, "8 io fidelity", passed,
           f"{sum(round_trips)}/{len(round_trips)} fixtures byte-identical; max csv gap {worst:.2e}")
