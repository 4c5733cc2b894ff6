"""SoC specification documents (JSON).

Top-level keys: ``SoC_General``, ``BUS_INTERFACE``, one ``IP_<n>`` object
per IP block, and ``Assets`` (a single object or a list).  Values are
kept as given; counts such as ``NO_OF_IP`` are numeric strings.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any


class SpecError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class IpBlock:
    key: str
    name: str
    type: str
    operation: str
    extra: dict = field(default_factory=dict)

    @property
    def signals(self) -> list[str]:
        return [str(s) for s in self.extra.get("SIGNALS", [])]

    @property
    def threat_model(self) -> str | None:
        t = self.extra.get("THREAT_MODEL")
        return str(t) if t else None


@dataclass(frozen=True)
class Asset:
    name: str
    type: str
    owner: str | None = None
    signals: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict)


@dataclass
class SpecFile:
    soc_general: dict
    bus_interface: dict
    ip_blocks: list[IpBlock]
    assets: list[Asset]
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def name(self) -> str:
        return str(self.soc_general.get("NAME", ""))

    @property
    def bus(self) -> str:
        return str(self.soc_general.get("BUS", ""))

    @property
    def declared_ips(self) -> int | None:
        v = self.soc_general.get("NO_OF_IP")
        return None if v is None else int(v)

    def ip_views(self) -> list[dict]:
        """One self-contained description per IP, as fed to prompts."""
        views = []
        for ip in self.ip_blocks:
            views.append({
                "soc": {k: self.soc_general[k] for k in sorted(self.soc_general)},
                "bus_interface": {k: self.bus_interface[k] for k in sorted(self.bus_interface)},
                "ip": {"KEY": ip.key, "NAME": ip.name, "TYPE": ip.type, "OPERATION": ip.operation,
                       **{k: ip.extra[k] for k in sorted(ip.extra)}},
                "assets": [_asset_view(a) for a in self.assets if a.owner in (None, ip.name, ip.key)],
            })
        return views

    def asset_signals(self) -> dict[str, set[str]]:
        return {a.name: set(a.signals) for a in self.assets}


def _asset_view(a: Asset) -> dict:
    out = {"NAME": a.name, "TYPE": a.type}
    if a.owner:
        out["OWNER"] = a.owner
    if a.signals:
        out["SIGNALS"] = list(a.signals)
    out.update({k: a.extra[k] for k in sorted(a.extra)})
    return out


_IP_KEY = re.compile(r"^IP_(\d+)$")


def _require_str(obj: dict, key: str, path: str) -> str:
    if key not in obj:
        raise SpecError(f"{path}.{key}", "missing required field")
    v = obj[key]
    if not isinstance(v, (str, int)) or isinstance(v, bool):
        raise SpecError(f"{path}.{key}", "expected a string")
    return str(v)


def _count(obj: dict, key: str, path: str) -> None:
    if key in obj:
        v = str(obj[key])
        if not v.isdigit():
            raise SpecError(f"{path}.{key}", f"expected a non-negative count, got {obj[key]!r}")


def spec_from_dict(doc: Any, strict: bool = False) -> SpecFile:
    if not isinstance(doc, dict):
        raise SpecError("", "spec document must be a JSON object")
    general = doc.get("SoC_General")
    if not isinstance(general, dict):
        raise SpecError("SoC_General", "missing or not an object")
    for key in ("NAME", "TYPE", "BUS"):
        _require_str(general, key, "SoC_General")
    _count(general, "NO_OF_IP", "SoC_General")
    bus = doc.get("BUS_INTERFACE", {})
    if not isinstance(bus, dict):
        raise SpecError("BUS_INTERFACE", "not an object")
    _count(bus, "NO_OF_PORTS", "BUS_INTERFACE")

    ips = []
    for key in sorted((k for k in doc if _IP_KEY.match(k)), key=lambda k: int(_IP_KEY.match(k).group(1))):
        body = doc[key]
        if not isinstance(body, dict):
            raise SpecError(key, "not an object")
        name = _require_str(body, "NAME", key)
        typ = _require_str(body, "TYPE", key)
        op = str(body.get("OPERATION", ""))
        extra = {k: v for k, v in body.items() if k not in ("NAME", "TYPE", "OPERATION")}
        if "SIGNALS" in extra and not isinstance(extra["SIGNALS"], list):
            raise SpecError(f"{key}.SIGNALS", "expected a list of signal names")
        ips.append(IpBlock(key, name, typ, op, extra))

    raw_assets = doc.get("Assets", [])
    if isinstance(raw_assets, dict):
        raw_assets = [raw_assets]
    if not isinstance(raw_assets, list):
        raise SpecError("Assets", "expected an object or a list of objects")
    assets = []
    ip_names = {ip.name for ip in ips} | {ip.key for ip in ips}
    for i, a in enumerate(raw_assets):
        path = f"Assets[{i}]"
        if not isinstance(a, dict):
            raise SpecError(path, "not an object")
        name = _require_str(a, "NAME", path)
        typ = _require_str(a, "TYPE", path)
        owner = a.get("OWNER")
        if owner is not None and str(owner) not in ip_names:
            raise SpecError(f"{path}.OWNER", f"references undeclared IP {owner!r}")
        sigs = a.get("SIGNALS", [])
        if not isinstance(sigs, list):
            raise SpecError(f"{path}.SIGNALS", "expected a list of signal names")
        extra = {k: v for k, v in a.items() if k not in ("NAME", "TYPE", "OWNER", "SIGNALS")}
        assets.append(Asset(name, typ, None if owner is None else str(owner), tuple(map(str, sigs)), extra))

    spec = SpecFile(dict(general), dict(bus), ips, assets, doc)
    if strict and spec.declared_ips is not None and spec.declared_ips != len(ips):
        raise SpecError("SoC_General.NO_OF_IP",
                        f"declares {spec.declared_ips} IPs but {len(ips)} IP blocks are present")
    return spec


def ingest_spec(source: str | Path | dict, strict: bool = False) -> SpecFile:
    """Load and validate a spec document."""
    if isinstance(source, dict):
        return spec_from_dict(source, strict)
    path = Path(source)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecError(str(path), f"invalid JSON: {exc}") from None
    return spec_from_dict(doc, strict)
