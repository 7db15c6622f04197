"""Framework configuration and cost-table documents.

Both are JSON with a versioned ``schema_version`` field; the framework
config is also accepted as TOML (Python 3.11+ or the ``tomli`` extra).
Schemas are documented in docs/schemas.md.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any

from .costs import WEIGHT_PRESETS, CostFactor, CostTable, validate_weights
from .errors import ConfigError
from .metrics import MetricSpec
from .significance import DEFAULT_ALPHA, DEFAULT_MIN_SLICE_SIZE
from .tokenization import Tokenizer, make_tokenizer

SCHEMA_VERSION = 1

CRITERION_TYPES = (
    "effectiveness",
    "efficiency",
    "length",
    "frequency",
    "lexical",
    "out_of_distribution",
    "margin",
    "file",
)


@dataclass(frozen=True)
class CriterionSpec:
    criterion_id: str
    kind: str  # "primary" | "secondary"
    type: str
    params: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class CostCap:
    mode: str = "none"  # "none" | "anchor" | "absolute"
    value: float | None = None
    on: str = "aggregated_cost"


@dataclass(frozen=True)
class FrameworkConfig:
    incumbent: str
    candidates: tuple[str, ...]
    metric: MetricSpec
    alpha: float = DEFAULT_ALPHA
    practical_margin: float = 0.01
    min_slice_size: int = DEFAULT_MIN_SLICE_SIZE
    weights: dict[str, float] = field(default_factory=lambda: dict(WEIGHT_PRESETS["latency-focus"]))
    lam: float = 0.0
    chosen_system: str | None = None
    cost_cap: CostCap = field(default_factory=CostCap)
    anchor: str | None = None  # defaults to the incumbent
    frequency_statistic: str = "collection_frequency"
    criteria: tuple[CriterionSpec, ...] = ()
    qualitative_notes: dict[str, str] = field(default_factory=dict)
    tokenizer: Tokenizer = field(default_factory=Tokenizer)
    base_dir: Path = field(default_factory=Path)

    @property
    def anchor_id(self) -> str:
        return self.anchor or self.incumbent

    def resolve_path(self, relative: str) -> Path:
        path = Path(relative)
        return path if path.is_absolute() else self.base_dir / path


def _load_document(stream: IO[bytes] | IO[str] | str | Path) -> tuple[dict, Path]:
    if isinstance(stream, (str, Path)):
        path = Path(stream)
        raw = path.read_bytes()
        base = path.parent
        is_toml = path.suffix.lower() == ".toml"
    else:
        data = stream.read()
        raw = data.encode("utf-8") if isinstance(data, str) else data
        name = getattr(stream, "name", "")
        base = Path(name).parent if name else Path()
        is_toml = str(name).lower().endswith(".toml")
    if is_toml:
        try:
            import tomllib  # Python 3.11+
        except ModuleNotFoundError:
            try:
                import tomli as tomllib  # type: ignore[no-redef]
            except ModuleNotFoundError:
                raise ConfigError(
                    "TOML config support needs Python 3.11+ or the 'retdecide[toml]' extra; use JSON instead"
                ) from None
        try:
            doc = tomllib.loads(raw.decode("utf-8"))
        except Exception as exc:
            raise ConfigError(f"invalid TOML: {exc}") from None
    else:
        try:
            doc = json.loads(raw.decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("top-level document must be an object")
    return doc, base


def _check_schema_version(doc: dict, what: str) -> None:
    version = doc.get("schema_version")
    if version is None:
        raise ConfigError(f"{what} is missing 'schema_version'")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"{what} has schema_version {version!r}; this build reads version {SCHEMA_VERSION}")


def parse_costs(stream: IO[bytes] | IO[str] | str | Path) -> CostTable:
    """Parse the cost-table JSON document.

    Factor values must be strictly positive: every value can appear as a
    normalization anchor, so zero would poison the ratios downstream.
    """
    doc, _ = _load_document(stream)
    _check_schema_version(doc, "cost table")
    systems_doc = doc.get("systems")
    if not isinstance(systems_doc, dict) or not systems_doc:
        raise ConfigError("cost table needs a non-empty 'systems' object")
    systems: dict[str, dict[str, CostFactor]] = {}
    for system_id, factors_doc in systems_doc.items():
        if not isinstance(factors_doc, dict) or not factors_doc:
            raise ConfigError(f"system {system_id!r} needs a non-empty factor map")
        factors: dict[str, CostFactor] = {}
        for name, entry in factors_doc.items():
            if isinstance(entry, dict):
                value = entry.get("value")
                unit = entry.get("unit", "")
            else:
                value, unit = entry, ""
            if not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
                raise ConfigError(f"cost factor {name!r} of system {system_id!r} must be a number > 0, got {value!r}")
            factors[name] = CostFactor(value=float(value), unit=str(unit))
        systems[system_id] = factors
    return CostTable(systems=systems)


def validate_costs_cover(costs: CostTable, weights: dict[str, float], system_ids: list[str]) -> None:
    """Every listed system must report every positively weighted factor."""
    needed = [f for f, w in weights.items() if w > 0]
    for system_id in system_ids:
        if system_id not in costs.systems:
            raise ConfigError(f"cost table has no record for system {system_id!r}")
        for factor in needed:
            if factor not in costs.systems[system_id]:
                raise ConfigError(f"system {system_id!r} is missing cost factor {factor!r}")


def _parse_criterion(entry: dict, index: int) -> CriterionSpec:
    if not isinstance(entry, dict):
        raise ConfigError(f"criterion #{index} must be an object")
    cid = entry.get("id")
    if not cid or not isinstance(cid, str):
        raise ConfigError(f"criterion #{index} needs a string 'id'")
    kind = entry.get("kind", "secondary")
    if kind not in ("primary", "secondary"):
        raise ConfigError(f"criterion {cid!r}: kind must be primary or secondary, got {kind!r}")
    ctype = entry.get("type")
    if ctype not in CRITERION_TYPES:
        raise ConfigError(f"criterion {cid!r}: unknown type {ctype!r} (expected one of {CRITERION_TYPES})")
    params = {k: v for k, v in entry.items() if k not in ("id", "kind", "type")}
    if ctype == "efficiency":
        caps = [k for k in ("factor_cap", "margin_cap") if params.get(k) is not None]
        if len(caps) != 1:
            raise ConfigError(f"criterion {cid!r}: set exactly one of factor_cap / margin_cap")
    if ctype in ("length", "frequency"):
        if "m" not in params or "n" not in params:
            raise ConfigError(f"criterion {cid!r}: needs bounds 'm' and 'n'")
    if ctype == "lexical" and "max_overlap" not in params:
        raise ConfigError(f"criterion {cid!r}: needs 'max_overlap'")
    if ctype == "out_of_distribution":
        if "epsilon" not in params or "train_queries" not in params:
            raise ConfigError(f"criterion {cid!r}: needs 'epsilon' and 'train_queries'")
    if ctype == "margin":
        if "delta" not in params or "threshold" not in params:
            raise ConfigError(f"criterion {cid!r}: needs 'delta' and 'threshold'")
    if ctype == "file" and "path" not in params:
        raise ConfigError(f"criterion {cid!r}: needs 'path'")
    return CriterionSpec(criterion_id=cid, kind=kind, type=ctype, params=params)


def parse_config(stream: IO[bytes] | IO[str] | str | Path) -> FrameworkConfig:
    doc, base = _load_document(stream)
    _check_schema_version(doc, "framework config")

    incumbent = doc.get("incumbent")
    if not incumbent or not isinstance(incumbent, str):
        raise ConfigError("config needs a single 'incumbent' system id")
    candidates = tuple(doc.get("candidates", ()))
    for c in candidates:
        if c == incumbent:
            raise ConfigError(f"candidate {c!r} is also the incumbent")

    metric = MetricSpec.parse(doc.get("metric", "ndcg@10"))
    threshold = doc.get("binarization_threshold")
    if threshold is not None:
        metric = MetricSpec(metric.kind, metric.cutoff, int(threshold))

    alpha = float(doc.get("alpha", DEFAULT_ALPHA))
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must be in (0, 1), got {alpha}")
    margin = float(doc.get("practical_margin", 0.01))
    if margin < 0:
        raise ConfigError(f"practical_margin must be >= 0, got {margin}")
    min_slice = int(doc.get("min_slice_size", DEFAULT_MIN_SLICE_SIZE))

    preset = doc.get("weight_preset")
    if preset is not None and "weights" in doc:
        raise ConfigError("set either 'weights' or 'weight_preset', not both")
    if preset is not None:
        if preset not in WEIGHT_PRESETS:
            raise ConfigError(f"unknown weight preset {preset!r} (known: {sorted(WEIGHT_PRESETS)})")
        weights = dict(WEIGHT_PRESETS[preset])
    else:
        weights = {str(k): float(v) for k, v in doc.get("weights", WEIGHT_PRESETS["latency-focus"]).items()}
    validate_weights(weights)

    lam = float(doc.get("lambda", 0.0))
    if lam < 0:
        raise ConfigError(f"lambda must be >= 0, got {lam}")

    cap_doc = doc.get("cost_cap", {})
    if not isinstance(cap_doc, dict):
        raise ConfigError("'cost_cap' must be an object")
    cap_mode = cap_doc.get("mode", "none")
    if cap_mode not in ("none", "anchor", "absolute"):
        raise ConfigError(f"cost_cap mode must be none/anchor/absolute, got {cap_mode!r}")
    cap_value = cap_doc.get("value")
    if cap_mode == "absolute" and (not isinstance(cap_value, (int, float)) or cap_value <= 0):
        raise ConfigError("absolute cost_cap needs a numeric 'value' > 0")
    cost_cap = CostCap(mode=cap_mode, value=float(cap_value) if cap_value is not None else None,
                       on=cap_doc.get("on", "aggregated_cost"))

    tok_doc = doc.get("tokenizer", {})
    vocab = tok_doc.get("vocabulary")
    if vocab is not None:
        vocab_path = Path(vocab)
        vocab = vocab_path if vocab_path.is_absolute() else base / vocab_path
    tokenizer = make_tokenizer(tok_doc.get("mode", "word"), vocab)

    stat = doc.get("frequency_statistic", "collection_frequency")
    if stat not in ("collection_frequency", "document_frequency"):
        raise ConfigError(f"unknown frequency_statistic {stat!r}")

    criteria = tuple(_parse_criterion(entry, i) for i, entry in enumerate(doc.get("criteria", [])))
    seen_ids = set()
    for spec in criteria:
        if spec.criterion_id in seen_ids:
            raise ConfigError(f"duplicate criterion id {spec.criterion_id!r}")
        seen_ids.add(spec.criterion_id)

    notes = doc.get("qualitative_notes", {})
    if not isinstance(notes, dict):
        raise ConfigError("'qualitative_notes' must map criterion names to text")

    chosen = doc.get("chosen_system")

    return FrameworkConfig(
        incumbent=incumbent,
        candidates=candidates,
        metric=metric,
        alpha=alpha,
        practical_margin=margin,
        min_slice_size=min_slice,
        weights=weights,
        lam=lam,
        chosen_system=chosen,
        cost_cap=cost_cap,
        anchor=doc.get("anchor"),
        frequency_statistic=stat,
        criteria=criteria,
        qualitative_notes={str(k): str(v) for k, v in notes.items()},
        tokenizer=tokenizer,
        base_dir=base,
    )
