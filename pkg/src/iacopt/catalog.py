"""Infrastructural elements catalog: the pool of deployable VMs, databases and storage.

A catalog is an immutable, ordered list of :class:`CatalogElement` records plus a
per-type index. A genotype gene for a slot of type ``t`` addresses the position
inside ``catalog.of_type(t)``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

import numpy as np

PROVIDERS = ("amazon", "google", "openstack", "azure")
REGIONS = ("00EU", "01US", "02AS", "ES", "FR", "DE", "IT")
EUROPE = "00EU"
# share of generated elements placed in 00EU; the remainder is uniform over the other codes
EUROPE_SHARE = 0.5

COST_RANGES = {"vm": (5.0, 500.0), "db": (10.0, 400.0), "storage": (1.0, 100.0)}
AVAILABILITY_RANGE = (99.0, 99.99)
PERFORMANCE_RANGE = (1.0, 100.0)

FILTERABLE_PROPERTIES = ("region", "provider")


class CatalogError(ValueError):
    """Raised for malformed catalog documents or invalid element attributes."""

    def __init__(self, message: str, element_id: str | None = None, field_name: str | None = None):
        parts = [message]
        if element_id is not None:
            parts.append(f"element={element_id!r}")
        if field_name is not None:
            parts.append(f"field={field_name!r}")
        super().__init__("; ".join(parts))
        self.element_id = element_id
        self.field_name = field_name


class ElementType(enum.Enum):
    VM = "vm"
    DB = "db"
    STORAGE = "storage"

    @classmethod
    def parse(cls, token: str) -> "ElementType":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise CatalogError(f"unknown element type {token!r}") from None


class ElementCounts(NamedTuple):
    vm: int = 99
    db: int = 24
    storage: int = 33


@dataclass(frozen=True)
class CatalogElement:
    id: str
    element_type: ElementType
    provider: str
    region: str
    cost: float
    availability: float
    performance: float

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise CatalogError("id must be a non-empty string", self.id or None, "id")
        for name in ("cost", "availability", "performance"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise CatalogError("attribute must be a finite number", self.id, name)
        if self.cost <= 0:
            raise CatalogError("cost must be > 0", self.id, "cost")
        if not 0 < self.availability <= 100:
            raise CatalogError("availability must be in (0, 100]", self.id, "availability")
        if self.performance <= 0:
            raise CatalogError("performance must be > 0", self.id, "performance")

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "type": self.element_type.value,
            "provider": self.provider,
            "region": self.region,
            "cost_eur_month": self.cost,
            "availability_pct": self.availability,
            "performance": self.performance,
        }


@dataclass(frozen=True)
class Catalog:
    elements: tuple[CatalogElement, ...]
    _by_type: Mapping[ElementType, tuple[CatalogElement, ...]] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        elements = tuple(self.elements)
        seen: set[str] = set()
        for element in elements:
            if element.id in seen:
                raise CatalogError("duplicate id", element.id, "id")
            seen.add(element.id)
        by_type = {t: tuple(e for e in elements if e.element_type is t) for t in ElementType}
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "_by_type", by_type)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def of_type(self, element_type: ElementType) -> tuple[CatalogElement, ...]:
        return self._by_type[element_type]

    def counts(self) -> ElementCounts:
        return ElementCounts(
            vm=len(self.of_type(ElementType.VM)),
            db=len(self.of_type(ElementType.DB)),
            storage=len(self.of_type(ElementType.STORAGE)),
        )


def _require(record: Mapping, key: str, element_id: str | None):
    if key not in record:
        raise CatalogError("missing field", element_id, key)
    return record[key]


def _element_from_record(record, position: int) -> CatalogElement:
    if not isinstance(record, Mapping):
        raise CatalogError(f"element #{position} is not an object")
    element_id = _require(record, "id", None)
    if not isinstance(element_id, str):
        raise CatalogError("id must be a string", str(element_id), "id")
    type_token = _require(record, "type", element_id)
    if not isinstance(type_token, str):
        raise CatalogError("type must be a string", element_id, "type")
    try:
        element_type = ElementType.parse(type_token)
    except CatalogError:
        raise CatalogError(f"unknown element type {type_token!r}", element_id, "type") from None
    for key in ("provider", "region"):
        if not isinstance(_require(record, key, element_id), str):
            raise CatalogError("must be a string", element_id, key)
    return CatalogElement(
        id=element_id,
        element_type=element_type,
        provider=record["provider"],
        region=record["region"],
        cost=_require(record, "cost_eur_month", element_id),
        availability=_require(record, "availability_pct", element_id),
        performance=_require(record, "performance", element_id),
    )


def load_catalog(text: str) -> Catalog:
    """Parse a JSON catalog document (an array of element records).

    Raises:
        CatalogError: on malformed JSON, missing or mistyped fields, duplicate ids,
            unknown element types, or attributes out of range. The message names the
            offending element id and field.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"malformed catalog document: {exc}") from None
    if not isinstance(data, list):
        raise CatalogError("catalog document must be a JSON array of element records")
    return Catalog(tuple(_element_from_record(record, i) for i, record in enumerate(data)))


def render_catalog(catalog: Catalog) -> str:
    return json.dumps([e.to_record() for e in catalog], indent=2) + "\n"


def generate_catalog(seed: int, counts: Iterable[int] = ElementCounts()) -> Catalog:
    """Build a synthetic catalog with ``counts = (vm, db, storage)`` elements.

    Costs are log-uniform within the per-type range, availability and performance
    uniform. The same seed always yields the same catalog.
    """
    counts = ElementCounts(*counts)
    if any(int(c) != c or c < 0 for c in counts):
        raise ValueError(f"element counts must be non-negative integers, got {tuple(counts)}")
    rng = np.random.default_rng(seed)
    other_regions = [r for r in REGIONS if r != EUROPE]
    elements = []
    for element_type, count in zip(
        (ElementType.VM, ElementType.DB, ElementType.STORAGE), counts
    ):
        lo, hi = COST_RANGES[element_type.value]
        for i in range(count):
            cost = math.exp(rng.uniform(math.log(lo), math.log(hi)))
            availability = rng.uniform(*AVAILABILITY_RANGE)
            performance = rng.uniform(*PERFORMANCE_RANGE)
            provider = PROVIDERS[rng.integers(len(PROVIDERS))]
            if rng.random() < EUROPE_SHARE:
                region = EUROPE
            else:
                region = other_regions[rng.integers(len(other_regions))]
            elements.append(
                CatalogElement(
                    id=f"{element_type.value}-{i:03d}",
                    element_type=element_type,
                    provider=provider,
                    region=region,
                    cost=round(cost, 2),
                    availability=round(availability, 3),
                    performance=round(performance, 2),
                )
            )
    return Catalog(tuple(elements))


def filter_catalog(catalog: Catalog, constraints: Mapping[str, Iterable[str]] | Iterable) -> Catalog:
    """Keep only elements whose region/provider is allowed by every constraint.

    ``constraints`` is either a mapping ``property -> allowed values`` or an iterable
    of ``(property, allowed values)`` pairs.
    """
    pairs = constraints.items() if isinstance(constraints, Mapping) else constraints
    checks = []
    for prop, allowed in pairs:
        if prop not in FILTERABLE_PROPERTIES:
            raise CatalogError(f"unknown filter property {prop!r}")
        checks.append((prop, frozenset(allowed)))
    if not checks:
        return catalog
    kept = tuple(e for e in catalog if all(getattr(e, p) in allowed for p, allowed in checks))
    return Catalog(kept)
