"""
Monte Carlo study configuration.

A study is the cross product

    error mean x error sd x covariance x method x penalty x sample size

with shared replicate settings. Study files are JSON (or YAML) validated
against STUDY_CONFIG_SCHEMA on load.
"""
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from config import load_document, validate_document
from models.errors import ConfigError
from models.mean_functions import ModelKind, ModelSpec
from objectives.objective import Method
from penalties.penalty import DEFAULT_SCAD_A, PenaltyFamily
from schema import STUDY_CONFIG_SCHEMA
from spatial.field import CovarianceSpec, CovariateStructure

logger = logging.getLogger(__name__)

DEFAULT_THETA = (1.0, 4.0, 3.0, 2.0, 1.0) + (0.0,) * 15


@dataclass(frozen=True)
class StudyCell:
    """One cell of the study grid; ``covariance`` carries the cell's mu and sigma."""

    mu: float
    sigma: float
    covariance: CovarianceSpec
    method: Method
    penalty: PenaltyFamily
    n: int

    @property
    def cell_id(self) -> str:
        return (
            f"{self.mu:g}|{self.sigma:g}|{self.covariance.name}|"
            f"{self.method.value}|{self.penalty.value}|{self.n}"
        )


@dataclass(frozen=True)
class StudyConfig:
    """Study grid plus replicate settings.

    Attributes:
        sample_sizes: n values
        error_means: field means mu
        error_sds: field standard deviations sigma
        covariances: covariance stubs (family, range, nugget, name)
        methods: estimation methods
        penalties: penalty families
        repetitions: replicates R per cell (>= 2)
        base_seed: root of the per-replicate seed scheme
        true_theta: generating parameter vector
        model: logistic or linear mean function
        covariate_correlation: pairwise covariate correlation
        covariate_structure: equicorrelation or ar1
        grid_size: lambda path length
        random_restarts: extra starts per fit (logistic needs some)
        failure_budget: share of replicates allowed to fail per cell
        scad_a: SCAD shape parameter
        exempt: theta indices left unpenalized; None means the asymptote
            theta_1 for the logistic model and nothing for the linear one
    """

    sample_sizes: Tuple[int, ...]
    error_means: Tuple[float, ...]
    error_sds: Tuple[float, ...]
    covariances: Tuple[CovarianceSpec, ...]
    methods: Tuple[Method, ...]
    penalties: Tuple[PenaltyFamily, ...]
    repetitions: int
    true_theta: Tuple[float, ...] = DEFAULT_THETA
    base_seed: int = 0
    model: ModelKind = ModelKind.LOGISTIC
    covariate_correlation: float = 0.5
    covariate_structure: CovariateStructure = CovariateStructure.EQUICORRELATION
    grid_size: int = 30
    random_restarts: int = 3
    failure_budget: float = 0.1
    scad_a: float = DEFAULT_SCAD_A
    name: str = "study"
    exempt: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "model", ModelKind(self.model))
        object.__setattr__(self, "methods", tuple(Method(m) for m in self.methods))
        object.__setattr__(self, "penalties", tuple(PenaltyFamily(p) for p in self.penalties))
        object.__setattr__(self, "covariate_structure", CovariateStructure(self.covariate_structure))
        if self.repetitions < 2:
            raise ConfigError("must be >= 2", "study.repetitions")
        if self.model not in (ModelKind.LOGISTIC, ModelKind.LINEAR):
            raise ConfigError(f"unsupported study model {self.model}", "study.model")
        if self.model is ModelKind.LOGISTIC and len(self.true_theta) < 2:
            raise ConfigError("logistic model needs at least 2 parameters", "study.true_theta")
        if self.grid_size < 2:
            raise ConfigError("must be >= 2", "study.grid_size")
        if self.exempt is not None:
            object.__setattr__(self, "exempt", tuple(sorted({int(j) for j in self.exempt})))
            bad = [j for j in self.exempt if not 0 <= j < len(self.true_theta)]
            if bad:
                raise ConfigError(f"indices {bad} outside 0..{len(self.true_theta) - 1}", "study.exempt")

    @classmethod
    def from_dict(
        cls,
        document: Dict[str, Any],
        base_seed: Optional[int] = None,
        defaults: Optional[Dict[str, Any]] = None,
    ) -> "StudyConfig":
        """Validate a study document and build the config.

        ``defaults`` is the ``study`` section of config.yml; it supplies
        ``repetitions`` and ``failure_budget`` when the document omits them.

        Raises:
            ConfigError: document fails schema validation (message carries the field path)
        """
        validate_document(document, STUDY_CONFIG_SCHEMA, "study")
        defaults = defaults or {}
        covariances = tuple(
            CovarianceSpec(
                family=c["family"],
                range=float(c["range"]),
                nugget=float(c.get("nugget", 0.2)),
                name=c["name"],
            )
            for c in document["covariances"]
        )
        names = [c.name for c in covariances]
        if len(set(names)) != len(names):
            raise ConfigError("covariance names must be unique", "study.covariances")
        seed = document.get("base_seed", 0) if base_seed is None else base_seed
        return cls(
            sample_sizes=tuple(int(n) for n in document["sample_sizes"]),
            error_means=tuple(float(m) for m in document["error_means"]),
            error_sds=tuple(float(s) for s in document["error_sds"]),
            covariances=covariances,
            methods=tuple(Method(m) for m in document["methods"]),
            penalties=tuple(PenaltyFamily(p) for p in document["penalties"]),
            repetitions=int(document.get("repetitions", defaults.get("repetitions", 100))),
            true_theta=tuple(float(t) for t in document["true_theta"]),
            base_seed=int(seed),
            model=ModelKind(document.get("model", ModelKind.LOGISTIC.value)),
            covariate_correlation=float(document.get("covariate_correlation", 0.5)),
            covariate_structure=CovariateStructure(
                document.get("covariate_structure", CovariateStructure.EQUICORRELATION.value)
            ),
            grid_size=int(document.get("grid_size", 30)),
            random_restarts=int(document.get("random_restarts", 3)),
            failure_budget=float(document.get("failure_budget", defaults.get("failure_budget", 0.1))),
            scad_a=float(document.get("scad_a", DEFAULT_SCAD_A)),
            name=str(document.get("name", "study")),
            exempt=tuple(document["exempt"]) if "exempt" in document else None,
        )

    @classmethod
    def load(
        cls,
        path: Union[str, Path],
        base_seed: Optional[int] = None,
        defaults: Optional[Dict[str, Any]] = None,
    ) -> "StudyConfig":
        return cls.from_dict(load_document(path), base_seed, defaults)

    def to_dict(self) -> Dict[str, Any]:
        """Resolved study document (round-trips through from_dict)."""
        document = {
            "name": self.name,
            "model": self.model.value,
            "sample_sizes": list(self.sample_sizes),
            "error_means": list(self.error_means),
            "error_sds": list(self.error_sds),
            "covariances": [
                {"name": c.name, "family": c.family.value, "range": c.range, "nugget": c.nugget}
                for c in self.covariances
            ],
            "methods": [m.value for m in self.methods],
            "penalties": [p.value for p in self.penalties],
            "repetitions": self.repetitions,
            "base_seed": self.base_seed,
            "true_theta": list(self.true_theta),
            "covariate_correlation": self.covariate_correlation,
            "covariate_structure": self.covariate_structure.value,
            "grid_size": self.grid_size,
            "random_restarts": self.random_restarts,
            "failure_budget": self.failure_budget,
            "scad_a": self.scad_a,
        }
        if self.exempt is not None:
            document["exempt"] = list(self.exempt)
        return document

    def with_overrides(self, **changes) -> "StudyConfig":
        return replace(self, **changes)

    @property
    def p(self) -> int:
        return len(self.true_theta)

    @property
    def n_covariates(self) -> int:
        return self.p - 1 if self.model is ModelKind.LOGISTIC else self.p

    @property
    def model_spec(self) -> ModelSpec:
        return ModelSpec.for_covariates(self.model, self.n_covariates)

    @property
    def penalty_exempt(self) -> Tuple[int, ...]:
        if self.exempt is not None:
            return self.exempt
        return (0,) if self.model is ModelKind.LOGISTIC else ()

    @property
    def support(self) -> np.ndarray:
        return np.asarray(self.true_theta) != 0

    def cells(self) -> List[StudyCell]:
        """All cells in table order: mu, sigma, covariance, method, penalty, n."""
        result = []
        for mu in self.error_means:
            for sigma in self.error_sds:
                for stub in self.covariances:
                    covariance = replace(stub, mean=mu, sd=sigma)
                    for method in self.methods:
                        for penalty in self.penalties:
                            for n in self.sample_sizes:
                                result.append(StudyCell(mu, sigma, covariance, method, penalty, n))
        return result
