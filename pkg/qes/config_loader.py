from pathlib import Path
from typing import Dict, List, Tuple

import yaml
from loguru import logger
from pydantic import BaseModel, Field, ValidationError

from qes.errors import ConfigFileError


class FamilyConfig(BaseModel):
    deg_x: int = Field(..., ge=3, le=4)
    n: List[int]


class CountingConfig(BaseModel):
    families: Dict[str, FamilyConfig] = Field(
        default_factory=lambda: {
            "heun": FamilyConfig(deg_x=3, n=[1, 2, 3]),
            "gheun1": FamilyConfig(deg_x=4, n=[1, 2]),
            "dependent": FamilyConfig(deg_x=4, n=[1, 2, 3]),
        }
    )
    trials: int = Field(3, ge=1)
    max_rounds: int = Field(4, ge=1)


class ReportConfig(BaseModel):
    seeds: List[int] = Field(default_factory=lambda: [20240601, 7, 11])
    identity_specs: int = 100
    oracle_specs: int = 20
    dependent_specs: int = 20
    form_trials: int = 3
    perturbation_trials: int = 100
    discrepancy_specs: int = 10
    restarts: int = 200


class TwoElectronGrid(BaseModel):
    delta: List[float] = Field(default_factory=lambda: [1.0, 1.5, 2.0, 2.5, 3.0])
    gamma: List[float] = Field(default_factory=lambda: [0.5, 0.875, 1.25, 1.625, 2.0])


class Phi6Config(BaseModel):
    mu: float = Field(1.0, gt=0)
    max_n: int = 4


class RNConfig(BaseModel):
    r_minus: float = Field(0.5, gt=0, lt=1)
    unknowns: List[str] = Field(default_factory=lambda: ["a", "m_s"])


class DiracConfig(BaseModel):
    Z: float = 1.0
    m_e: float = Field(1.0, gt=0)
    l: List[int] = Field(default_factory=lambda: [0, 1, 2])


class DecaticConfig(BaseModel):
    N: int = 3
    l: int = 0
    points: List[Tuple[float, float]] = Field(default_factory=lambda: [(0.0, 0.0), (1.0, 0.5), (-1.0, 1.0)])


class ApplicationsConfig(BaseModel):
    two_electron: TwoElectronGrid = Field(default_factory=TwoElectronGrid)
    phi6: Phi6Config = Field(default_factory=Phi6Config)
    rn: RNConfig = Field(default_factory=RNConfig)
    dirac: DiracConfig = Field(default_factory=DiracConfig)
    decatic: DecaticConfig = Field(default_factory=DecaticConfig)


class ExperimentsConfig(BaseModel):
    counting: CountingConfig = Field(default_factory=CountingConfig)
    report: ReportConfig = Field(default_factory=ReportConfig)
    applications: ApplicationsConfig = Field(default_factory=ApplicationsConfig)


class ConfigLoader:
    def __init__(self, experiments_file: Path):
        self.experiments_file = Path(experiments_file)

    def load(self) -> ExperimentsConfig:
        logger.info(f"Loading experiments from: {self.experiments_file}")

        try:
            with open(self.experiments_file, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        except FileNotFoundError as e:
            logger.error(f"Config file not found: {self.experiments_file}")
            raise ConfigFileError(f"Config file not found: {self.experiments_file}") from e
        except yaml.YAMLError as e:
            logger.error(f"Failed to parse config: {e}")
            raise ConfigFileError(f"Failed to parse {self.experiments_file}: {e}") from e

        if not isinstance(data, dict):
            raise ConfigFileError(f"{self.experiments_file} must hold a mapping at the top level")

        try:
            config = ExperimentsConfig.model_validate(data)
        except ValidationError as e:
            logger.error(f"Invalid experiments file: {e}")
            raise ConfigFileError(f"Invalid experiments file {self.experiments_file}: {e}") from e

        logger.info(f"Loaded {len(config.counting.families)} counting families")
        return config
