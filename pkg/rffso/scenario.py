"""
Scenario files: INI text with [rf], [fso_d], [fso_e], [secrecy] and an optional
[mc] section. SNRs are given in dB and converted to linear scale here, once.

Each section is validated by a pydantic model; failures surface as ConfigError
with a file:line: [section] key: message diagnostic.
"""

from __future__ import annotations

import configparser
import logging
import re
from pathlib import Path
from typing import Dict, Mapping, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .config import MIN_TRIALS, get_default_seed, get_default_trials
from .errors import ConfigError, SecrecyError
from .fso_channel import FsoParams, fso_electrical_snr, fso_zeta_t
from .metrics import ScenarioConfig
from .montecarlo import McConfig
from .rf_channel import RfParams

logger = logging.getLogger(__name__)

REQUIRED_SECTIONS = ("rf", "fso_d", "fso_e", "secrecy")
OPTIONAL_SECTIONS = ("mc",)


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def _integral(value):
    """Accept integer-valued floats ("2", "2.0") where an integer is required."""
    if isinstance(value, str):
        value = value.strip()
        try:
            value = int(value)
        except ValueError:
            value = float(value)
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"must be an integer, got {value}")
        value = int(value)
    return value


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class RfSection(_Section):
    alpha: float = Field(..., gt=0)
    kappa: float = Field(..., ge=0)
    mu: int = Field(..., ge=1)
    x_shadow: float = Field(..., gt=0)
    phi_r_db: float

    _mu_integral = field_validator("mu", mode="before")(_integral)

    def to_params(self) -> RfParams:
        return RfParams(
            alpha=self.alpha, kappa=self.kappa, mu=self.mu, x_shadow=self.x_shadow,
            phi_r=db_to_linear(self.phi_r_db),
        )


class FsoSection(_Section):
    a: float = Field(..., gt=0)
    b: int = Field(..., ge=1)
    eps: float = Field(..., gt=0)
    s: int = Field(1, ge=1, le=2)
    r_scatter: float = Field(..., ge=0)
    zeta_t: Optional[float] = Field(None, ge=0)
    h0: Optional[float] = Field(None, ge=0)
    rho: Optional[float] = Field(None, ge=0, le=1)
    theta_x: float = 0.0
    theta_y: float = 0.0
    u_db: Optional[float] = None
    phi_db: Optional[float] = None

    _integral_fields = field_validator("b", "s", mode="before")(_integral)

    @model_validator(mode="after")
    def _one_source_each(self) -> "FsoSection":
        if (self.u_db is None) == (self.phi_db is None):
            raise ValueError("give exactly one of u_db (electrical SNR) or phi_db (average SNR)")
        micro = self.h0 is not None or self.rho is not None
        if self.zeta_t is not None and micro:
            raise ValueError("give either zeta_t or the micro-parameters h0/rho, not both")
        if self.zeta_t is None and (self.h0 is None or self.rho is None):
            raise ValueError("zeta_t is required unless both h0 and rho are given")
        return self

    def coherent_power(self) -> float:
        if self.zeta_t is not None:
            return self.zeta_t
        return fso_zeta_t(self.h0, self.rho, self.theta_x, self.theta_y)[1]

    def to_params(self) -> FsoParams:
        zeta_t = self.coherent_power()
        if self.u_db is not None:
            u_elec = db_to_linear(self.u_db)
        else:
            u_elec = fso_electrical_snr(
                self.a, self.b, self.eps, self.s, self.r_scatter, zeta_t, db_to_linear(self.phi_db)
            )
        return FsoParams(
            a=self.a, b=self.b, eps=self.eps, s=self.s, r_scatter=self.r_scatter,
            zeta_t=zeta_t, u_elec=u_elec,
        )


class SecrecySection(_Section):
    target_rate: float = Field(..., ge=0, description="bits/s/Hz")


class McSection(_Section):
    n_trials: int = Field(default_factory=get_default_trials, ge=MIN_TRIALS)
    seed: int = Field(default_factory=get_default_seed, ge=0, lt=2 ** 64)
    batch: Optional[int] = Field(None, ge=1)

    _integral_fields = field_validator("n_trials", "seed", "batch", mode="before")(_integral)


_SECTION_MODELS = {
    "rf": RfSection,
    "fso_d": FsoSection,
    "fso_e": FsoSection,
    "secrecy": SecrecySection,
    "mc": McSection,
}


class Scenario(BaseModel):
    """A validated scenario file."""

    model_config = ConfigDict(frozen=True)

    source: str = "<string>"
    rf: RfSection
    fso_d: FsoSection
    fso_e: FsoSection
    secrecy: SecrecySection
    mc: McSection = Field(default_factory=McSection)

    def to_config(self) -> ScenarioConfig:
        try:
            return ScenarioConfig(
                rf=self.rf.to_params(),
                fso_d=self.fso_d.to_params(),
                fso_e=self.fso_e.to_params(),
                target_rate=self.secrecy.target_rate,
            )
        except SecrecyError as exc:
            raise ConfigError(str(exc), source=self.source) from exc

    def mc_config(self, n_trials: Optional[int] = None, seed: Optional[int] = None,
                  workers: int = 1) -> McConfig:
        kwargs = {
            "n_trials": n_trials if n_trials is not None else self.mc.n_trials,
            "seed": seed if seed is not None else self.mc.seed,
            "workers": workers,
        }
        if self.mc.batch is not None:
            kwargs["batch"] = self.mc.batch
        try:
            return McConfig(**kwargs)
        except SecrecyError as exc:
            raise ConfigError(str(exc), source=self.source, section="mc") from exc


def _find_line(text: str, section: str, key: Optional[str] = None) -> Optional[int]:
    """1-based line of a section header, or of `key` inside that section."""
    current = None
    header = re.compile(r"^\s*\[([^\]]+)\]")
    for number, line in enumerate(text.splitlines(), start=1):
        match = header.match(line)
        if match:
            current = match.group(1).strip()
            if key is None and current == section:
                return number
            continue
        if current == section and key is not None:
            name = re.split(r"[=:]", line, maxsplit=1)[0].strip()
            if name == key:
                return number
    return None


def parse_scenario_text(text: str, source: str = "<string>") -> Scenario:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(
            getattr(exc, "message", str(exc)).splitlines()[0],
            source=source,
            line=getattr(exc, "lineno", None),
        ) from exc

    unknown = [name for name in parser.sections() if name not in _SECTION_MODELS]
    if unknown:
        raise ConfigError(
            f"unknown section; expected {', '.join(REQUIRED_SECTIONS + OPTIONAL_SECTIONS)}",
            source=source, line=_find_line(text, unknown[0]), section=unknown[0],
        )
    missing = [name for name in REQUIRED_SECTIONS if not parser.has_section(name)]
    if missing:
        raise ConfigError(f"missing section [{missing[0]}]", source=source)

    sections: Dict[str, BaseModel] = {}
    for name in parser.sections():
        raw = dict(parser.items(name))
        try:
            sections[name] = _SECTION_MODELS[name].model_validate(raw)
        except ValidationError as exc:
            error = exc.errors()[0]
            key = str(error["loc"][0]) if error.get("loc") else None
            message = error["msg"]
            line = _find_line(text, name, key) if key else _find_line(text, name)
            raise ConfigError(message, source=source, line=line, section=name, key=key) from exc
    logger.debug("parsed scenario %s with sections %s", source, sorted(sections))
    return Scenario(source=source, **sections)


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file: {exc.strerror}", source=str(path)) from exc
    return parse_scenario_text(text, source=str(path))


def render_scenario_text(sections: Mapping[str, Mapping[str, object]]) -> str:
    """INI text of a {section: {key: value}} mapping, floats written with repr."""
    lines = []
    for name, values in sections.items():
        if lines:
            lines.append("")
        lines.append(f"[{name}]")
        for key, value in values.items():
            if value is None:
                continue
            lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    return "\n".join(lines) + "\n"
