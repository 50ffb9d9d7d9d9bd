"""Experiment configuration files.

The format is flat key-value text, diff-friendly and language-agnostic::

    # comment (also ;)
    [profile]
    degree = 2, fraction = 0.9
    degree = 12, fraction = 0.1

    [code]
    k = 6000

    [simulate]
    ebn0_db = 4.0, 5.0, 6.0
    mode = fading

Sections may appear in any order; every key is optional and falls back
to the module defaults below, but unknown sections, unknown keys, duplicate
scalar keys and malformed values are all hard errors. The [profile] section
is the one place a key repeats: each ``degree = <int>, fraction = <real>``
line adds one repetition class.

Section reference (defaults in parentheses):

[profile]   degree/fraction entries; fractions must sum to 1
[code]      k (6000), build_seed (1), decoder_iterations (50),
            mother_rate (1/2), code_rate (1/2)
[de]        half_range (40.0), bins (4095), window (10000), guard (100),
            samples_per_iteration (1000000), max_iterations (300),
            target_error (1e-6), stall_window (20), stall_improvement (1e-3)
[threshold] precision_db (0.02), bracket_low_db (0.0), bracket_high_db (1.5)
[evolve]    ebn0_db (required by the evolve command), gains (absent = AWGN)
[boundary]  ebn0_db (8.0), rays (17), radius_cap (8.0),
            radius_precision (0.05), include_axes (true),
            compare_regular (false)
[pdeo]      ebn0_db (8.0), samples (500), audit_samples (50)
[outage]    ebn0_db (grid, required by the outage command),
            samples (1000000)
[simulate]  ebn0_db (grid, required by the simulate command),
            mode (fading), min_word_errors (100), max_frames (1000000)
[audit]     trials (200), sabotage (false)

Rates accept "1/2" or a decimal. Grids are comma-separated reals.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .density_evolution import DeConfig
from .ensemble import DegreeProfile, ProfileError, validate_profile

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "load_config",
           "config_hash"]


class ConfigError(ValueError):
    """Malformed or infeasible experiment configuration."""


def _int(text: str) -> int:
    try:
        return int(text, 10)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a real number, got {text!r}") from None


def _rate(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"expected a rate like 1/2, got {text!r}") from None


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"expected true/false, got {text!r}")


def _float_list(text: str) -> tuple[float, ...]:
    items = [part.strip() for part in text.split(",")]
    if not all(items):
        raise ConfigError(f"expected comma-separated reals, got {text!r}")
    return tuple(_float(part) for part in items)


def _mode(text: str) -> str:
    if text not in ("fading", "awgn"):
        raise ConfigError(f"mode must be fading or awgn, got {text!r}")
    return text


_SCHEMA = {
    "code": {
        "k": _int,
        "build_seed": _int,
        "decoder_iterations": _int,
        "mother_rate": _rate,
        "code_rate": _rate,
    },
    "de": {
        "half_range": _float,
        "bins": _int,
        "window": _int,
        "guard": _int,
        "samples_per_iteration": _int,
        "max_iterations": _int,
        "target_error": _float,
        "stall_window": _int,
        "stall_improvement": _float,
    },
    "threshold": {
        "precision_db": _float,
        "bracket_low_db": _float,
        "bracket_high_db": _float,
    },
    "evolve": {
        "ebn0_db": _float,
        "gains": _float_list,
    },
    "boundary": {
        "ebn0_db": _float,
        "rays": _int,
        "radius_cap": _float,
        "radius_precision": _float,
        "include_axes": _bool,
        "compare_regular": _bool,
    },
    "pdeo": {
        "ebn0_db": _float,
        "samples": _int,
        "audit_samples": _int,
    },
    "outage": {
        "ebn0_db": _float_list,
        "samples": _int,
    },
    "simulate": {
        "ebn0_db": _float_list,
        "mode": _mode,
        "min_word_errors": _int,
        "max_frames": _int,
    },
    "audit": {
        "trials": _int,
        "sabotage": _bool,
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description, one section per command family."""

    profile: DegreeProfile | None
    code: dict = field(default_factory=dict)
    de: dict = field(default_factory=dict)
    threshold: dict = field(default_factory=dict)
    evolve: dict = field(default_factory=dict)
    boundary: dict = field(default_factory=dict)
    pdeo: dict = field(default_factory=dict)
    outage: dict = field(default_factory=dict)
    simulate: dict = field(default_factory=dict)
    audit: dict = field(default_factory=dict)

    def de_config(self) -> DeConfig:
        try:
            return DeConfig(**self.de)
        except ValueError as exc:
            raise ConfigError(f"[de] {exc}") from exc

    def require_profile(self) -> DegreeProfile:
        if self.profile is None:
            raise ConfigError("this command needs a [profile] section")
        return self.profile


def _parse_profile_entry(line: str, entries: list) -> None:
    parts = [part.strip() for part in line.split(",")]
    pairs = []
    for part in parts:
        key, eq, value = part.partition("=")
        if not eq:
            raise ConfigError(f"malformed profile entry {line!r}")
        pairs.append((key.strip(), value.strip()))
    if [key for key, _ in pairs] != ["degree", "fraction"]:
        raise ConfigError(
            f"profile entries read 'degree = <int>, fraction = <real>', "
            f"got {line!r}")
    entries.append((_int(pairs[0][1]), _rate(pairs[1][1])))


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate one configuration document."""
    section = None
    sections: dict[str, dict] = {name: {} for name in _SCHEMA}
    profile_entries: list[tuple[int, Fraction]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"line {lineno}: unterminated section header")
            section = line[1:-1].strip()
            if section != "profile" and section not in _SCHEMA:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if section is None:
            raise ConfigError(f"line {lineno}: entry before any [section]")
        if section == "profile":
            try:
                _parse_profile_entry(line, profile_entries)
            except ConfigError as exc:
                raise ConfigError(f"line {lineno}: {exc}") from None
            continue
        key, eq, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not eq or not key or not value:
            raise ConfigError(f"line {lineno}: expected key = value")
        schema = _SCHEMA[section]
        if key not in schema:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in "
                              f"[{section}]")
        if key in sections[section]:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} in "
                              f"[{section}]")
        try:
            sections[section][key] = schema[key](value)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {key}: {exc}") from None

    profile = None
    if profile_entries:
        degrees = [d for d, _ in profile_entries]
        if len(set(degrees)) != len(degrees):
            raise ConfigError("[profile] repeats a degree")
        try:
            profile = validate_profile(dict(profile_entries))
        except ProfileError as exc:
            raise ConfigError(f"[profile] {exc}") from exc

    return ExperimentConfig(profile=profile, **sections)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    return parse_config(text)


def config_hash(path: str | Path) -> str:
    """Stable short digest of the config file bytes, for output metadata."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]
