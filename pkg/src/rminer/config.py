"""Application configuration: JSON file, env-var fallback, scorer factory."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path

from .heuristics import HeuristicScorer
from .model import DEFAULT_END_DATE

CONFIG_ENV_VAR = "RMINER_CONFIG"


class ConfigError(ValueError):
    """Unreadable or invalid configuration file."""


@dataclass
class AppConfig:
    lexicon_path: str | None = None
    roster_path: str | None = None
    sweep_delta: dict | None = None
    role_scores: dict | None = None
    dfsc_table: list | None = None
    negation_penalty: float = -0.8
    slim_base: float = 0.9
    mt_base: float = 0.9
    samcer_base: float = 0.9
    rmsscm_base: float = 0.4
    rfute_base: float = 0.9
    dtim_base: float = 0.9
    dthp_base: float = 0.9
    disabled: list = field(default_factory=list)
    min_score: float = 0.0
    end_date: str | None = None
    extra_states: list = field(default_factory=list)
    state_commit_lists: list = field(default_factory=lambda: ["python-checkins"])
    pep_summary_subject_cues: list = field(
        default_factory=lambda: ["pep summary", "summary of python-dev"])
    base_dir: str | None = None  # directory of the config file, for relative paths

    def resolve_path(self, value: str | None) -> str | None:
        if value is None:
            return None
        path = Path(value)
        if not path.is_absolute() and self.base_dir:
            path = Path(self.base_dir) / path
        return str(path)

    def end_datetime(self) -> datetime:
        if self.end_date is None:
            return DEFAULT_END_DATE
        try:
            dt = datetime.fromisoformat(self.end_date)
        except ValueError as exc:
            raise ConfigError(f"bad end_date {self.end_date!r}: {exc}") from exc
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return dt.astimezone(timezone.utc)


def load_app_config(path=None) -> AppConfig:
    """Load configuration from a file, the RMINER_CONFIG env var, or defaults.

    Unknown keys are rejected rather than ignored so typos fail loudly.
    """
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None
    if path is None:
        return AppConfig()
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")

    known = {f.name for f in fields(AppConfig)} - {"base_dir"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(
            f"{path}: unknown config keys: {sorted(unknown)} "
            f"(known: {sorted(known)})")
    config = AppConfig(**data)
    config.base_dir = str(path.resolve().parent)
    config.end_datetime()  # validate eagerly
    return config


def make_scorer(config: AppConfig, lexicon=None, n_jobs=None) -> HeuristicScorer:
    """Build an unfitted scorer from configuration.

    lexicon overrides the configured lexicon path (the CLI --lexicon flag).
    """
    dfsc = None
    if config.dfsc_table is not None:
        try:
            dfsc = tuple((int(d), float(s)) for d, s in config.dfsc_table)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad dfsc_table: {exc}") from exc
    return HeuristicScorer(
        lexicon=lexicon if lexicon is not None else config.resolve_path(
            config.lexicon_path),
        roster=config.resolve_path(config.roster_path),
        sweep_delta=config.sweep_delta,
        role_scores=config.role_scores,
        dfsc_table=dfsc,
        negation_penalty=config.negation_penalty,
        slim_base=config.slim_base,
        mt_base=config.mt_base,
        samcer_base=config.samcer_base,
        rmsscm_base=config.rmsscm_base,
        rfute_base=config.rfute_base,
        dtim_base=config.dtim_base,
        dthp_base=config.dthp_base,
        disabled=list(config.disabled) or None,
        n_jobs=n_jobs,
    )
