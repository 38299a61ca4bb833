"""Distribution-shift robustness metrics for a fleet of detection methods.

For a method m with mAP ``map_h`` on the original benchmark and comprehensive
mAP ``map_r`` averaged over the shifted domains, the robust ratio is
RR_m = map_r / map_h and the robust ratio margin is RRM_m = RR_m minus the
fleet-mean RR.  RRM is a relative metric: it measures how much more (or less)
of its clean performance a method retains compared to the average method.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import ConfigError


class UndefinedRatioError(ZeroDivisionError):
    """Robust ratio is undefined when the original-domain mAP is zero."""


def comprehensive_map(per_domain: Mapping[str, float]) -> float:
    """Arithmetic mean of per-domain mAPs."""
    if not per_domain:
        raise ConfigError("comprehensive_map needs at least one domain")
    return float(sum(per_domain.values()) / len(per_domain))


def robust_ratio(map_h: float, map_r: float) -> float:
    """Fraction of original-domain performance retained under shift."""
    if map_h == 0:
        raise UndefinedRatioError("robust ratio undefined for map_h = 0")
    return map_r / map_h


@dataclass(frozen=True)
class MethodRobustness:
    method: str
    map_h: float
    map_r: float
    rr: float
    per_domain: dict[str, float] | None = None

    def to_dict(self) -> dict:
        out = {"method": self.method, "map_h": self.map_h,
               "map_r": self.map_r, "rr": self.rr}
        if self.per_domain is not None:
            out["per_domain"] = dict(self.per_domain)
        return out


@dataclass(frozen=True)
class FleetReport:
    """RR per method plus margins against the fleet-mean RR.

    Without an override the margins are zero-sum by construction.  With an
    override (pinning the mean to a value computed over a larger fleet than
    the listed rows) they are not, and `mean_rr_overridden` records that.
    """

    methods: tuple[MethodRobustness, ...]
    mean_rr: float
    mean_rr_overridden: bool
    rrm: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "methods": [m.to_dict() for m in self.methods],
            "mean_rr": self.mean_rr,
            "mean_rr_overridden": self.mean_rr_overridden,
            "rrm": dict(self.rrm),
        }


def fleet_report(methods: Sequence[tuple[str, float, float]],
                 mean_rr_override: float | None = None,
                 per_domain: Mapping[str, Mapping[str, float]] | None = None,
                 ) -> FleetReport:
    """Robust ratios and margins for a fleet of (name, map_h, map_r) rows.

    Method names must be unique (rrm is keyed by name).  `per_domain`
    optionally attaches the per-domain mAPs behind each map_r.
    """
    if not methods and mean_rr_override is None:
        raise ConfigError("empty fleet without a mean-rr override")
    names = [name for name, _h, _r in methods]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate method names in fleet")
    rows = []
    for name, map_h, map_r in methods:
        rows.append(MethodRobustness(
            method=name, map_h=map_h, map_r=map_r,
            rr=robust_ratio(map_h, map_r),
            per_domain=dict(per_domain[name]) if per_domain and name in per_domain
            else None,
        ))
    if mean_rr_override is not None:
        mean_rr = float(mean_rr_override)
    else:
        mean_rr = float(sum(m.rr for m in rows) / len(rows))
    rrm = {m.method: m.rr - mean_rr for m in rows}
    return FleetReport(methods=tuple(rows), mean_rr=mean_rr,
                       mean_rr_overridden=mean_rr_override is not None, rrm=rrm)


def parse_pairs(raw: object) -> tuple[list[tuple[str, float, float]],
                                      dict[str, dict[str, float]]]:
    """Parse a pairs list: rows carry map_r directly or a per_domain map.

    Returns (rows, per_domain_maps).  Unknown keys are ignored so data files
    may carry annotations of their own.
    """
    from .core import SchemaError
    if not isinstance(raw, list):
        raise SchemaError("pairs file: expected a JSON list")
    rows: list[tuple[str, float, float]] = []
    domains: dict[str, dict[str, float]] = {}
    for k, item in enumerate(raw):
        if not isinstance(item, dict) or "method" not in item:
            raise SchemaError(f"pairs[{k}]: expected an object with 'method'")
        if "map_h" not in item:
            raise SchemaError(f"pairs[{k}]: missing 'map_h'")
        name = item["method"]
        map_h = float(item["map_h"])
        if "per_domain" in item:
            per_dom = {str(d): float(v) for d, v in item["per_domain"].items()}
            map_r = comprehensive_map(per_dom)
            domains[name] = per_dom
        elif "map_r" in item:
            map_r = float(item["map_r"])
        else:
            raise SchemaError(f"pairs[{k}]: needs 'map_r' or 'per_domain'")
        rows.append((name, map_h, map_r))
    return rows, domains
