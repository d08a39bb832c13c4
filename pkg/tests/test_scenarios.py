"""Scenario pipelines: config resolution, outputs, determinism, checks."""

import json

import pytest

from padic_sssi import scenarios
from padic_sssi.errors import ConfigError
from padic_sssi.laws import Gaussian, SymmetricPareto


def small_config(scenario, outdir, **kw):
    raw = {"scenario": scenario, "out_dir": str(outdir)}
    raw.update(kw)
    return scenarios.resolve_config(raw)


def test_resolve_config_layering():
    cfg = scenarios.resolve_config({"scenario": "equivalence"})
    assert cfg.kmax == 16  # scenario default beats base default
    assert cfg.p == 2
    cfg2 = scenarios.resolve_config({"scenario": "equivalence", "kmax": 5})
    assert cfg2.kmax == 5  # user beats scenario default
    cfg3 = scenarios.resolve_config({"scenario": "equivalence"}, overrides={"kmax": 7})
    assert cfg3.kmax == 7  # CLI override beats file
    cfg4 = scenarios.resolve_config({"scenario": "equivalence", "kmax": 5}, overrides={"kmax": None})
    assert cfg4.kmax == 5  # absent overrides are ignored


def test_resolve_config_rejections():
    with pytest.raises(ConfigError, match="scenario"):
        scenarios.resolve_config({"scenario": "unknown"})
    with pytest.raises(ConfigError, match="unknown config keys"):
        scenarios.resolve_config({"scenario": "equivalence", "qq": 1})
    with pytest.raises(ConfigError, match="p must be prime"):
        scenarios.resolve_config({"scenario": "equivalence", "p": 9})
    with pytest.raises(ConfigError, match="hurst"):
        scenarios.resolve_config({"scenario": "equivalence", "hurst": -0.5})
    with pytest.raises(ConfigError, match="alpha"):
        scenarios.resolve_config({"scenario": "identity-suite", "law": {"variant": "pareto", "alpha": 0.8}})
    with pytest.raises(ConfigError, match="law"):
        scenarios.resolve_config({"scenario": "equivalence", "law": {"variant": "zeta"}})
    with pytest.raises(ConfigError, match="tau_max"):
        scenarios.resolve_config({"scenario": "equivalence", "tau_max": 1 << 20})
    with pytest.raises(ConfigError, match="epsilons"):
        scenarios.resolve_config({"scenario": "equivalence", "epsilons": []})
    with pytest.raises(ConfigError, match="mc_seeds"):
        scenarios.resolve_config({"scenario": "identity-suite", "mc_seeds": 1})


def test_theorem_5_2_accepts_blocked_alpha():
    # the non-integrable tail is allowed here; the runner substitutes a proxy
    cfg = scenarios.resolve_config({"scenario": "theorem-5-2"})
    assert isinstance(cfg.law, SymmetricPareto)
    assert cfg.law.alpha == 0.75


def test_config_to_dict_embeds_law():
    cfg = scenarios.resolve_config({"scenario": "equivalence", "law": {"variant": "gaussian", "sigma": 2.0}})
    d = cfg.to_dict()
    assert d["law"] == {"variant": "gaussian", "sigma": 2.0}
    assert cfg.law == Gaussian(2.0)
    json.dumps(d)


def test_hierarchy_demo_small(tmp_path):
    cfg = small_config("hierarchy-demo", tmp_path, horizon=512, tau_max=40, k_list=list(range(9)))
    code, payload = scenarios.run_scenario(cfg, check=True)
    assert code == 0
    assert payload["check_failures"] == []
    assert (tmp_path / "modulus.csv").exists()
    assert (tmp_path / "bohr.csv").exists()
    assert (tmp_path / "summary.json").exists()
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["scenario"] == "hierarchy-demo"
    assert summary["config"]["horizon"] == 512
    assert summary["version"]
    ind = summary["results"]["sequences"]["indicator3"]
    assert all(v == 1.0 for v in ind["moduli"].values())


def test_equivalence_small(tmp_path):
    cfg = small_config(
        "equivalence", tmp_path, replicates=3, kmax=10, horizon=2048, tau_max=128, k_list=list(range(9))
    )
    code, payload = scenarios.run_scenario(cfg, check=True)
    assert code == 0, payload["check_failures"]
    assert payload["results"]["gaussian_modulus_decay_pass"] == 3
    lines = (tmp_path / "modulus_curves.csv").read_text().strip().split("\n")
    assert lines[0] == "law,seed_index,K,omega"
    assert len(lines) == 1 + 2 * 3 * 9  # two laws, three seeds, nine K values


def test_theorem_5_2_small_runs_and_reports_mode(tmp_path):
    cfg = small_config("theorem-5-2", tmp_path, replicates=2, kmax=10, horizon=1 << 12, k_list=[0, 2, 4])
    code, payload = scenarios.run_scenario(cfg, check=False)
    assert code == 0
    mode = payload["results"]["mode"]
    assert mode["integrability_issue"]["parameter"] == "alpha"
    assert mode["proxy"]["alpha"] == 1.25
    assert (tmp_path / "tail_bounds.csv").exists()
    assert (tmp_path / "running_max.csv").exists()
    # in check mode the same tiny run must exit 4 with named sub-criteria
    code2, payload2 = scenarios.run_scenario(cfg, check=True)
    assert code2 == 4
    assert any("running max" in f for f in payload2["check_failures"])


def test_identity_suite_small(tmp_path):
    cfg = small_config("identity-suite", tmp_path, mc_seeds=800)
    code, payload = scenarios.run_scenario(cfg, check=True)
    assert code == 0, payload["check_failures"]
    # 8 scaling + 6 stationarity + 8 matched + 1 unmatched + 1 projection
    assert payload["results"]["tests"] == 24
    lines = (tmp_path / "identities.csv").read_text().strip().split("\n")
    assert lines[0].startswith("identity,params,repetition")
    assert len(lines) == 25


def test_field_demo_small(tmp_path):
    cfg = small_config("field-demo", tmp_path, replicates=2)
    code, payload = scenarios.run_scenario(cfg, check=True)
    assert code == 0, payload["check_failures"]
    assert payload["results"]["modulus_monotone"] is True
    assert (tmp_path / "field_translations.csv").exists()


def test_scenario_determinism(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        cfg = small_config("identity-suite", out, mc_seeds=600)
        assert scenarios.run_scenario(cfg)[0] == 0
    assert (out_a / "identities.csv").read_bytes() == (out_b / "identities.csv").read_bytes()


def test_threads_do_not_change_results(tmp_path, monkeypatch):
    out_a, out_b = tmp_path / "ser", tmp_path / "par"
    cfg_a = small_config("equivalence", out_a, replicates=3, kmax=8, horizon=1024, tau_max=64, threads=0)
    cfg_b = small_config("equivalence", out_b, replicates=3, kmax=8, horizon=1024, tau_max=64, threads=4)
    assert scenarios.run_scenario(cfg_a)[0] == 0
    assert scenarios.run_scenario(cfg_b)[0] == 0
    for name in ("modulus_curves.csv", "limit_periodic.csv", "bohr_gaps.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_effective_threads_env_cap(monkeypatch):
    monkeypatch.setenv("PADIC_SSSI_THREADS", "2")
    assert scenarios.effective_threads(8) == 2
    assert scenarios.effective_threads(1) == 1
    monkeypatch.setenv("PADIC_SSSI_THREADS", "nonsense")
    assert scenarios.effective_threads(8) == 8
    monkeypatch.delenv("PADIC_SSSI_THREADS")
    assert scenarios.effective_threads(0) == 1


def test_load_config_errors(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(ConfigError, match="cannot read"):
        scenarios.load_config(str(missing))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        scenarios.load_config(str(bad))
