from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Tuple, Union

from core.errors import ConfigError

OUTPUT_DIR_ENV = 'RECAGT_OUTPUT_DIR'
MERSENNE_61 = (1 << 61) - 1


def _parse_int(raw: str) -> int:
    return int(raw.replace('_', ''), 0)


def parse_int_list(raw: str) -> Tuple[int, ...]:
    return tuple(int(part) for part in raw.replace(' ', '').split(',') if part)


class Settings:
    seed: int = 42
    q: int = MERSENNE_61
    n: int = 6
    m: int = 2
    f: int = 1
    rho: float = 0.01
    delta: float = 1.0
    shard_bytes: int = 4096
    adversary: str = 'perturb'
    adversary_ids: Tuple[int, ...] = ()
    scalar_bytes: int = 1
    signature_bytes: int = 256
    secret_key_bytes: int = 128
    checksum_bytes: int = 16
    signature_scheme: str = 'hmac'
    max_resends: int = 2
    transmission_error_rate: float = 0.0
    strategy: str = 'dorfman'
    replications: int = 1000
    mc_draws: int = 100_000
    bench_repeats: int = 5
    bench_max_bytes: int = 64 * 1024 * 1024
    workers: int = 1
    output_dir: str = '.'

    PARSERS: Dict[str, Callable[[str], Any]] = {
        'int': _parse_int,
        'float': float,
        'str': str,
        'Tuple[int, ...]': parse_int_list,
    }

    def __init__(self, **overrides: Any) -> None:
        for key, value in overrides.items():
            self.set(key, value)

    def __repr__(self) -> str:
        inner = ', '.join(f"{k}={v}" for k, v in self.resolved().items())
        return f"<Settings({inner})>"

    @classmethod
    def keys(cls) -> Tuple[str, ...]:
        return tuple(key for key in cls.__annotations__ if not key.isupper())

    def set(self, key: str, value: Any) -> None:
        annotation = type(self).__annotations__.get(key)
        if annotation is None or key.isupper():
            raise ConfigError(f"Unknown configuration key '{key}'")

        if isinstance(value, str):
            try:
                value = self.PARSERS[annotation](value.strip())
            except (ValueError, KeyError) as e:
                raise ConfigError(f"Invalid value for '{key}': {value!r} ({e})") from e
        setattr(self, key, value)

    def update(self, values: Mapping[str, Any]) -> Settings:
        for key, value in values.items():
            if value is not None:
                self.set(key, value)
        return self

    @classmethod
    def from_file(cls, path: Union[str, Path], *, base: Optional[Settings] = None) -> Settings:
        settings = base if base is not None else cls()
        try:
            text = Path(path).read_text(encoding='utf-8')
        except OSError as e:
            raise ConfigError(f"Cannot read config file '{path}': {e}") from e

        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition('=')
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            settings.set(key.strip(), value)
        return settings

    def apply_env(self, environ: Optional[Mapping[str, str]] = None) -> Settings:
        environ = os.environ if environ is None else environ
        if value := environ.get(OUTPUT_DIR_ENV):
            self.set('output_dir', value)
        return self

    def resolved(self) -> Dict[str, str]:
        def show(value: Any) -> str:
            if isinstance(value, tuple):
                return ','.join(map(str, value))
            return str(value)

        return {key: show(getattr(self, key)) for key in self.keys()}

    def output_path(self, out: Optional[str]) -> Optional[Path]:
        if out is None:
            return None
        path = Path(out)
        if not path.is_absolute():
            path = Path(self.output_dir) / path
        return path
