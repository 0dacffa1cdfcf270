import json

import numpy as np
import pytest
from pydantic import ValidationError

from qsource.config import ExperimentConfig, PomSpec, Scenario, SourceSpec, load_config, to_matrix
from sources import SourceKind
from utils.budget import BudgetExceeded

BERNOULLI = {"kind": "bernoulli", "rho": [[0.75, 0], [0, 0.25]]}


def test_complex_entries():
    m = to_matrix([[0.5, [0, -0.25]], [[0, 0.25], 0.5]])
    assert m[0, 1] == -0.25j
    assert m[1, 0] == 0.25j
    with pytest.raises(ValueError):
        to_matrix([[1, 0]])


def test_source_spec_builds_each_kind():
    assert SourceSpec.model_validate(BERNOULLI).build().kind is SourceKind.bernoulli
    pauli = SourceSpec(kind="pauli-r", a=0.2, b=0.05, c=0.05)
    assert pauli.d == 2
    assert pauli.build().pauli_params == (0.2, 0.05, 0.05)
    comm = SourceSpec(kind="commuting-r", rho=[[0.5, 0], [0, 0.5]], basis=[[1, 0], [0, 1]])
    assert comm.build().kind is SourceKind.commuting_r
    ens = SourceSpec(
        kind="bernoulli", ensemble={"signals": [[1, 0], [0, 1]], "probs": [0.75, 0.25]}
    )
    assert ens.d == 2
    np.testing.assert_allclose(ens.build().rho.matrix, np.diag([0.75, 0.25]))


def test_source_spec_rejects_incomplete_documents():
    with pytest.raises(ValidationError):
        SourceSpec(kind="pauli-r")
    with pytest.raises(ValidationError):
        SourceSpec(kind="pauli-r", a=1.0)
    with pytest.raises(ValidationError):
        SourceSpec(kind="bernoulli")
    with pytest.raises(ValidationError):
        SourceSpec(kind="explicit-r", rho=[[1, 0], [0, 0]])
    with pytest.raises(ValidationError):
        SourceSpec(kind="bernoulli", rho=[[1, 0], [0, 0]], basis=[[1, 0], [0, 1]])
    with pytest.raises(ValidationError):
        SourceSpec.model_validate({**BERNOULLI, "colour": "blue"})


def test_pom_spec_requirements_and_outcomes():
    with pytest.raises(ValidationError):
        PomSpec(kind="scaled-identity")
    with pytest.raises(ValidationError):
        PomSpec(kind="random")
    assert PomSpec(kind="block-projective", blocks=[[0, 1], [2]]).outcomes(3) == 2
    assert PomSpec().outcomes(3) == 3
    f = SourceSpec.model_validate(BERNOULLI).build()
    assert PomSpec(kind="random", r=3, seed=1).build(f).r == 3


def test_random_pom_spec_is_seeded():
    f = SourceSpec(kind="pauli-r", a=0.0).build()
    one = PomSpec(kind="random-projective", seed=4).build(f)
    two = PomSpec(kind="random-projective", seed=4).build(f)
    np.testing.assert_array_equal(one.operators, two.operators)


def test_seeds_are_non_negative():
    with pytest.raises(ValidationError):
        ExperimentConfig.model_validate({"scenario": "aep", "source": BERNOULLI, "seed": -1})
    with pytest.raises(ValidationError):
        PomSpec(kind="random-projective", seed=-1)


def test_experiment_needs_source_except_certify():
    with pytest.raises(ValidationError, match="needs a source"):
        ExperimentConfig(scenario="aep")
    cfg = ExperimentConfig(scenario="certify-appendix")
    assert cfg.grid.a == [0.0]
    with pytest.raises(ValidationError):
        ExperimentConfig(scenario="certify-appendix", grid={"a": [1.0]})


def test_ergodicity_window_validation():
    with pytest.raises(ValidationError, match="window"):
        ExperimentConfig(scenario="ergodicity", source=BERNOULLI, window=6, shifts=[7])
    with pytest.raises(ValidationError, match="window"):
        ExperimentConfig(
            scenario="ergodicity", source=BERNOULLI, window=6, shifts=[2], probe={"b_site": 6}
        )


def test_block_lengths():
    cfg = ExperimentConfig(scenario="aep", source=BERNOULLI, n_values=[8, 4, 8])
    assert cfg.block_lengths == [4, 8]
    assert ExperimentConfig(scenario="aep", source=BERNOULLI).block_lengths == [6]
    with pytest.raises(ValidationError):
        ExperimentConfig(scenario="aep", source=BERNOULLI, n_values=[0])


def test_budgets_checked_before_work():
    cfg = ExperimentConfig(
        scenario="positivity", source=BERNOULLI, n_max=8, budgets={"max_dim": 64}
    )
    with pytest.raises(BudgetExceeded):
        cfg.check_budgets()
    aep = ExperimentConfig(
        scenario="aep", source=BERNOULLI, n_values=[12], budgets={"max_words": 1000}
    )
    with pytest.raises(BudgetExceeded) as exc:
        aep.check_budgets()
    assert exc.value.budget == "max_words"


def test_load_config(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({"scenario": "entropy-scan", "source": BERNOULLI, "n_max": 3}))
    cfg = load_config(path)
    assert cfg.scenario is Scenario.entropy_scan
    assert cfg.source.d == 2
    with pytest.raises(OSError):
        load_config(tmp_path / "missing.json")
