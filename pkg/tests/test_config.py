import pytest

from owc.config import FOG_PRESETS, TURBULENCE_PRESETS, ConfigError, RunConfig, load_config, parse_config

MINIMAL = """
[metrics]
compute = ["op"]
"""


def test_defaults_for_every_field():
    cfg = parse_config(MINIMAL)
    assert cfg == RunConfig()
    assert cfg.regime == "short-range" and cfg.n_hops == 1
    assert cfg.sweep.points() == [0.0, 10.0, 20.0, 30.0, 40.0]
    assert cfg.thresholds_db == (10.0,)
    assert (cfg.modulation.p, cfg.modulation.q) == (0.5, 0.5)
    assert cfg.mc.samples == 10**6 and cfg.output == "results.csv"


def test_presets_positional_mapping():
    assert FOG_PRESETS["light-fog"] == (2.32, 13.12)
    assert FOG_PRESETS["moderate-fog"] == (5.49, 12.06)
    assert FOG_PRESETS["dense-fog"] == (6.00, 23.00)
    assert TURBULENCE_PRESETS["weak-turbulence"] == (4.5916, 7.0941)
    cfg = parse_config('[system]\nregime = "long-range"\n[hop]\nfog = "dense-fog"\nturbulence = "strong-turbulence"\n')
    h = cfg.spec_at(0.0).hops[0]
    assert (h.fog_k, h.fog_beta, h.turb_a, h.turb_b) == (6.0, 23.0, 1.4321, 3.4948)
    assert h.distance_km == 1.5


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("[system]\nregim = 'short-range'\n", "unknown field 'regim'"),
        ("[hop]\nfog_kk = 2\n", "unknown field 'fog_kk' in [hop]"),
        ("[plot]\nx = 1\n", "unknown section"),
        ("[metrics]\ncompute = []\n", "compute is empty"),
        ("[metrics]\ncompute = ['snr']\n", "unknown metric"),
        ("[sweep]\nstart = 10\nstop = 0\n", "empty range"),
        ("[hop]\nfog = 'pea-soup'\n", "unknown fog preset"),
        ("[system]\nhops = 0\n", "must be positive"),
        ("[hop]\njitter_std = -1\n", "invalid hop parameters"),
        ("[mc]\nsamples = 10\n", "[mc]"),
        ("[metrics]\nmodulation = 'ook-imdd'\np = 1\nq = 1\n", "not both"),
        ("[system]\nhops = 2\n[sweep]\nvariable = 'hop-count'\n", "conflicts"),
    ],
)
def test_rejections(text, fragment):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert fragment in str(exc.value)


def test_parse_error_names_line():
    with pytest.raises(ConfigError) as exc:
        parse_config("[system]\nregime = \n")
    assert "line 2" in str(exc.value)


def test_equal_split_of_total_distance():
    cfg = parse_config('[system]\nhops = 3\ntotal_distance_km = 1.5\n[metrics]\ncompute = ["op"]\n')
    assert [h.distance_km for h in cfg.spec_at(10.0).hops] == pytest.approx([0.5] * 3)


def test_hop_count_sweep_keeps_total_distance():
    cfg = parse_config('[system]\nregime = "long-range"\n[hop]\ndistance_km = 1.5\n[sweep]\nvariable = "hop-count"\n')
    for n in (1, 2, 5):
        hops = cfg.spec_at(float(n)).hops
        assert len(hops) == n
        assert sum(h.distance_km for h in hops) == pytest.approx(1.5)


def test_explicit_hop_list():
    text = """
[[hops]]
distance_km = 0.2
fog = "dense-fog"
[[hops]]
distance_km = 0.8
"""
    spec = parse_config(text).spec_at(20.0)
    assert [h.distance_km for h in spec.hops] == [0.2, 0.8]
    assert spec.hops[0].fog_k == 6.0 and spec.hops[1].fog_k == 2.32


def test_beam_ratio_sets_waist():
    cfg = parse_config("[hop]\nbeam_ratio = 3.0\naperture_radius = 0.04\n")
    assert cfg.spec_at(0.0).hops[0].beam_waist == pytest.approx(0.12)


def test_gains_override_length_checked():
    cfg = parse_config("[system]\nhops = 2\ngains = [5.0, 6.0]\n")
    assert cfg.spec_at(0.0).gains == (5.0, 6.0)
    with pytest.raises(ConfigError):
        parse_config("[system]\nhops = 2\ngains = [5.0]\n")


def test_output_path_relative_to_config(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text('[output]\npath = "out/x.csv"\n')
    assert load_config(p).output == str(tmp_path / "out" / "x.csv")


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/run.toml")
