import logging
from pathlib import Path

import pytest

from core.errors import ConfigError
from core.logs import level_from_verbosity, setup_logging
from core.settings import MERSENNE_61, OUTPUT_DIR_ENV, Settings, parse_int_list

DEFAULTS_FILE = Path(__file__).resolve().parent.parent / 'default-settings.conf'


def test_defaults():
    s = Settings()
    assert (s.seed, s.q, s.n, s.m, s.f) == (42, MERSENNE_61, 6, 2, 1)
    assert s.rho == 0.01
    assert s.adversary_ids == ()
    assert 'PARSERS' not in Settings.keys()


def test_string_values_are_parsed():
    s = Settings(q='0x1fffffffffffffff', rho='0.05', adversary_ids='1, 2,3', mc_draws='10_000')
    assert s.q == MERSENNE_61
    assert s.rho == 0.05
    assert s.adversary_ids == (1, 2, 3)
    assert s.mc_draws == 10_000


def test_bad_values():
    with pytest.raises(ConfigError):
        Settings(n='six')
    with pytest.raises(ConfigError):
        Settings(colour='blue')
    with pytest.raises(ConfigError):
        Settings(PARSERS='x')


def test_parse_int_list():
    assert parse_int_list('') == ()
    assert parse_int_list('4096,8192') == (4096, 8192)


def test_shipped_defaults_file_matches_class_defaults():
    assert Settings.from_file(DEFAULTS_FILE).resolved() == Settings().resolved()


def test_from_file(tmp_path):
    path = tmp_path / 'recagt.conf'
    path.write_text("n = 24  # committee size\n\nadversary = silent\n")
    s = Settings.from_file(path, base=Settings(seed=7))
    assert (s.n, s.adversary, s.seed) == (24, 'silent', 7)

    path.write_text("n 24\n")
    with pytest.raises(ConfigError, match=':1:'):
        Settings.from_file(path)
    with pytest.raises(ConfigError):
        Settings.from_file(tmp_path / 'missing.conf')


def test_update_skips_unset_values():
    s = Settings().update({'n': 10, 'm': None})
    assert (s.n, s.m) == (10, 2)


def test_output_dir(tmp_path):
    s = Settings().apply_env({OUTPUT_DIR_ENV: str(tmp_path)})
    assert s.output_path('a.csv') == tmp_path / 'a.csv'
    assert s.output_path(str(tmp_path / 'abs.csv')) == tmp_path / 'abs.csv'
    assert s.output_path(None) is None
    assert Settings().apply_env({}).output_dir == '.'


def test_resolved_is_printable():
    resolved = Settings(adversary_ids=(3, 5)).resolved()
    assert resolved['adversary_ids'] == '3,5'
    assert all(isinstance(v, str) for v in resolved.values())


@pytest.mark.parametrize("verbosity, level", [(0, logging.WARNING), (1, logging.INFO), (2, logging.DEBUG), (5, logging.DEBUG)])
def test_level_from_verbosity(verbosity, level):
    assert level_from_verbosity(verbosity) == level


def test_setup_logging_replaces_its_own_handler(capsys):
    setup_logging(logging.INFO)
    setup_logging(logging.INFO)
    ours = [h for h in logging.getLogger().handlers if getattr(h, '_recagt', False)]
    assert len(ours) == 1
    logging.getLogger('tests.settings').info("hello")
    assert 'tests.settings: hello' in capsys.readouterr().err
