# ccthrust/repositories/material_repository.py

import logging
import math
import re
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple

from ccthrust.errors import ConfigurationError, DomainError
from ccthrust.physics.materials import base_material
from ccthrust.schemas import DampingConvention, LorentzResonance, MaterialModel

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"\s*(?:([{}=,:])|([^\s{}=,:]+))")

_TOP_KEYS = ("eps_b", "mu_b", "damping_convention")
_RESONANCE_KEYS = (
    "omega0_rad_s",
    "omega0_hz",
    "gamma_rel",
    "gamma_rad_s",
    "strength_e",
    "strength_m",
    "strength_kappa",
)


class MaterialRepository:
    """
    Reads material definition files.

    Grammar (one entry per line or comma separated, '#' starts a comment):

        eps_b = 3.1736
        mu_b = 0.9798
        damping_convention = gamma_omega
        resonance {
            omega0_rad_s = 1.8713e12    # or omega0_hz
            gamma_rel = 0.05463         # or gamma_rad_s
            strength_e = 0.1560
            strength_m = 0.0625
            strength_kappa = 0.0993
        }

    Resonance blocks may repeat; at least one is required.
    """

    def default(self) -> MaterialModel:
        """The built-in single-resonance Omega-particle medium."""
        return base_material()

    def load(self, path: Optional[str]) -> MaterialModel:
        """Parse a material file, or return the default medium when path is None."""
        if path is None:
            return self.default()
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigurationError(f"cannot read material file {path}: {e}", key="material") from e
        material = self.parse(text, source=str(path))
        logger.info("Loaded material %s with %d resonance(s)", path, len(material.resonances))
        return material

    def parse(self, text: str, source: str = "<string>") -> MaterialModel:
        tokens = list(self._tokenize(text, source))
        top: Dict[str, str] = {}
        blocks: List[Dict[str, str]] = []

        pos = 0
        while pos < len(tokens):
            word, line = tokens[pos]
            if word == ",":
                pos += 1
                continue
            if word == "resonance":
                block, pos = self._read_block(tokens, pos + 1, source)
                blocks.append(block)
                continue
            key, value, pos = self._read_entry(tokens, pos, source)
            if key not in _TOP_KEYS:
                raise ConfigurationError(f"{source}:{line}: unknown key '{key}'", key=key)
            if key in top:
                raise ConfigurationError(f"{source}:{line}: duplicate key '{key}'", key=key)
            top[key] = value

        if not blocks:
            raise ConfigurationError(f"{source}: no resonance block", key="resonance")
        for key in ("eps_b", "mu_b"):
            if key not in top:
                raise ConfigurationError(f"{source}: missing required key '{key}'", key=key)

        convention = top.get("damping_convention", DampingConvention.GAMMA_OMEGA.value)
        try:
            convention = DampingConvention(convention.strip().lower())
        except ValueError:
            raise ConfigurationError(
                f"{source}: unknown damping_convention '{convention}'", key="damping_convention"
            ) from None

        resonances = tuple(self._build_resonance(block, source) for block in blocks)
        try:
            return MaterialModel(
                eps_b=self._number(top, "eps_b", source),
                mu_b=self._number(top, "mu_b", source),
                resonances=resonances,
                damping_convention=convention,
            )
        except DomainError as e:
            raise ConfigurationError(f"{source}: {e}", key="material") from e

    # --------------------------------------------------------------------------
    # Parsing helpers
    # --------------------------------------------------------------------------

    @staticmethod
    def _tokenize(text: str, source: str) -> Iterator[Tuple[str, int]]:
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0]
            pos = 0
            while pos < len(line):
                match = _TOKEN.match(line, pos)
                if match is None:
                    if line[pos:].strip():
                        raise ConfigurationError(f"{source}:{lineno}: cannot parse '{line[pos:].strip()}'", key="material")
                    break
                pos = match.end()
                yield (match.group(1) or match.group(2)), lineno

    @staticmethod
    def _read_entry(tokens, pos: int, source: str) -> Tuple[str, str, int]:
        if pos + 2 >= len(tokens):
            line = tokens[pos][1]
            raise ConfigurationError(f"{source}:{line}: incomplete entry", key=tokens[pos][0])
        (key, line), (sep, _), (value, _) = tokens[pos], tokens[pos + 1], tokens[pos + 2]
        if sep not in ("=", ":") or value in ("{", "}", ",", "=", ":"):
            raise ConfigurationError(f"{source}:{line}: expected '{key} = <value>'", key=key)
        return key.lower(), value, pos + 3

    def _read_block(self, tokens, pos: int, source: str) -> Tuple[Dict[str, str], int]:
        if pos >= len(tokens) or tokens[pos][0] != "{":
            line = tokens[pos - 1][1]
            raise ConfigurationError(f"{source}:{line}: expected '{{' after resonance", key="resonance")
        block: Dict[str, str] = {}
        pos += 1
        while True:
            if pos >= len(tokens):
                raise ConfigurationError(f"{source}: unterminated resonance block", key="resonance")
            word, line = tokens[pos]
            if word == "}":
                return block, pos + 1
            if word == ",":
                pos += 1
                continue
            key, value, pos = self._read_entry(tokens, pos, source)
            if key not in _RESONANCE_KEYS:
                raise ConfigurationError(f"{source}:{line}: unknown resonance key '{key}'", key=key)
            if key in block:
                raise ConfigurationError(f"{source}:{line}: duplicate key '{key}'", key=key)
            block[key] = value

    @staticmethod
    def _number(values: Dict[str, str], key: str, source: str) -> float:
        try:
            number = float(values[key])
        except ValueError:
            raise ConfigurationError(f"{source}: '{key}' is not a number: {values[key]!r}", key=key) from None
        if not math.isfinite(number):
            raise ConfigurationError(f"{source}: '{key}' must be finite", key=key)
        return number

    def _build_resonance(self, block: Dict[str, str], source: str) -> LorentzResonance:
        if ("omega0_rad_s" in block) == ("omega0_hz" in block):
            raise ConfigurationError(f"{source}: give exactly one of omega0_rad_s, omega0_hz", key="omega0_rad_s")
        if ("gamma_rel" in block) == ("gamma_rad_s" in block):
            raise ConfigurationError(f"{source}: give exactly one of gamma_rel, gamma_rad_s", key="gamma_rel")
        for key in ("strength_e", "strength_m", "strength_kappa"):
            if key not in block:
                raise ConfigurationError(f"{source}: resonance block is missing '{key}'", key=key)

        if "omega0_hz" in block:
            omega0 = 2.0 * math.pi * self._number(block, "omega0_hz", source)
        else:
            omega0 = self._number(block, "omega0_rad_s", source)
        strengths = [self._number(block, k, source) for k in ("strength_e", "strength_m", "strength_kappa")]

        try:
            if "gamma_rel" in block:
                return LorentzResonance.from_relative_damping(omega0, self._number(block, "gamma_rel", source), *strengths)
            return LorentzResonance(omega0, self._number(block, "gamma_rad_s", source), *strengths)
        except DomainError as e:
            raise ConfigurationError(f"{source}: {e}", key="resonance") from e
