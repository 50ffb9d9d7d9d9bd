from fractions import Fraction

import pytest

from turbofade.config import ConfigError, config_hash, parse_config
from turbofade.density_evolution import DeConfig

GOOD = """
# irregular ensemble used throughout
[profile]
degree = 2, fraction = 0.9
degree = 12, fraction = 0.1

[code]
k = 6000
build_seed = 3

[de]
samples_per_iteration = 60000
window = 2000

[simulate]
ebn0_db = 4.0, 6.0, 8.0
mode = awgn
min_word_errors = 20
"""


def test_good_config_parses():
    cfg = parse_config(GOOD)
    assert dict(cfg.profile.fractions) == {2: Fraction(9, 10),
                                           12: Fraction(1, 10)}
    assert cfg.code["k"] == 6000
    assert cfg.simulate["ebn0_db"] == (4.0, 6.0, 8.0)
    assert cfg.simulate["mode"] == "awgn"
    de = cfg.de_config()
    assert de.samples_per_iteration == 60000
    assert de.window == 2000
    assert de.guard == DeConfig().guard


def test_defaults_when_sections_absent():
    cfg = parse_config("[profile]\ndegree = 2, fraction = 1\n")
    assert cfg.de_config() == DeConfig()
    assert cfg.simulate == {}
    assert cfg.profile is not None


def test_missing_profile_is_allowed_until_required():
    cfg = parse_config("[outage]\nebn0_db = 4.0\n")
    assert cfg.profile is None
    with pytest.raises(ConfigError, match="profile"):
        cfg.require_profile()


@pytest.mark.parametrize("text,fragment", [
    ("k = 1", "before any"),
    ("[nosuch]\n", "unknown section"),
    ("[code]\nk = 1\nk = 2", "duplicate"),
    ("[code]\nwidgets = 1", "unknown key"),
    ("[code]\nk = twelve", "integer"),
    ("[code]\nk 12", "key = value"),
    ("[profile]\ndegree = 2", "profile entries"),
    ("[profile]\nfraction = 0.5, degree = 2", "profile entries"),
    ("[profile]\ndegree = 2, fraction = 0.5\ndegree = 2, fraction = 0.5",
     "repeats a degree"),
    ("[profile]\ndegree = 2, fraction = 0.4", "sum"),
    ("[simulate]\nmode = noisy", "fading or awgn"),
    ("[simulate]\nebn0_db = 1.0,,2.0", "comma-separated"),
    ("[code", "unterminated"),
])
def test_rejected_configs(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(text)


def test_infeasible_de_section_is_config_error():
    cfg = parse_config("[de]\nguard = 4\n")
    with pytest.raises(ConfigError):
        cfg.de_config()


def test_line_numbers_in_messages():
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("[code]\nk = 6000\nwidgets = 1\n")


def test_config_hash_stable(tmp_path):
    path = tmp_path / "a.cfg"
    path.write_text(GOOD)
    first = config_hash(path)
    assert first == config_hash(path)
    assert len(first) == 16
    path.write_text(GOOD + "\n# trailing comment\n")
    assert config_hash(path) != first
