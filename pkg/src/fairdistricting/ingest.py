"""Reading aggregate vote data and the native JSON instance format."""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .election import MovSemantics, Voter
from .errors import MalformedInputError, ParseError
from .model import Assignment, DistrictingInstance, VoterGraph


@dataclass(frozen=True)
class AggregateRecord:
    district: str
    alternative: str
    count: int


@dataclass(frozen=True)
class SiteLocation:
    district: str
    x: float
    y: float


@dataclass
class AggregateData:
    records: list[AggregateRecord]
    districts: list[str]  # first-appearance order, index = district id
    alternatives: list[str]


def _open_text(source: str | Path | io.TextIOBase):
    if isinstance(source, (str, Path)):
        return open(source, newline="", encoding="utf-8")
    return source


def _rows(source, required: Sequence[str]):
    fh = _open_text(source)
    try:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [c for c in required if c not in header]
        if missing:
            raise ParseError(f"missing column(s) {', '.join(missing)}", 1)
        reader.fieldnames = header
        for row in reader:
            yield reader.line_num, row
    finally:
        if fh is not source:
            fh.close()


def load_aggregate_csv(source: str | Path | io.TextIOBase) -> AggregateData:
    """Parse ``district,alternative,count`` rows; ids follow first appearance."""
    records: list[AggregateRecord] = []
    districts: dict[str, int] = {}
    alternatives: dict[str, int] = {}
    seen: set[tuple[str, str]] = set()
    for line, row in _rows(source, ("district", "alternative", "count")):
        district = (row["district"] or "").strip()
        alt = (row["alternative"] or "").strip()
        raw = (row["count"] or "").strip()
        if not district or not alt:
            raise ParseError("empty district or alternative name", line)
        try:
            count = int(raw, 10)
        except ValueError:
            raise ParseError(f"count {raw!r} is not an integer", line) from None
        if count < 0:
            raise ParseError(f"negative count {count}", line)
        if (district, alt) in seen:
            raise ParseError(f"duplicate pair ({district}, {alt})", line)
        seen.add((district, alt))
        districts.setdefault(district, len(districts))
        alternatives.setdefault(alt, len(alternatives))
        records.append(AggregateRecord(district, alt, count))
    return AggregateData(records, list(districts), list(alternatives))


def load_locations_csv(source: str | Path | io.TextIOBase) -> dict[str, SiteLocation]:
    out: dict[str, SiteLocation] = {}
    for line, row in _rows(source, ("district", "x", "y")):
        name = (row["district"] or "").strip()
        if name in out:
            raise ParseError(f"duplicate location for {name}", line)
        try:
            out[name] = SiteLocation(name, float(row["x"]), float(row["y"]))
        except (TypeError, ValueError):
            raise ParseError("coordinates must be numbers", line) from None
    return out


def closest_districts(
    names: Sequence[str], locations: dict[str, SiteLocation], q: int
) -> list[frozenset]:
    """Per district, ids of the ``q`` nearest districts (itself always included)."""
    k = len(names)
    out = []
    for d, name in enumerate(names):
        here = locations[name]
        others = sorted(
            (e for e in range(k) if e != d),
            key=lambda e: (math.hypot(locations[names[e]].x - here.x, locations[names[e]].y - here.y), names[e]),
        )
        out.append(frozenset([d, *others[: q - 1]]))
    return out


def expand_to_instance(
    data: AggregateData,
    locations: dict[str, SiteLocation] | None = None,
    closest_q: int | None = None,
    sample_rate: float | None = None,
    seed: int = 0,
    s_min: int = 0,
    s_max: int | None = None,
    semantics: MovSemantics | str = MovSemantics.SET_CHANGE,
) -> DistrictingInstance:
    """One unit voter per counted vote, optionally Bernoulli down-sampled.

    Voters rank their own alternative first, then the others by overall
    popularity. Mobility is the ``closest_q`` nearest districts (full when
    ``closest_q`` is ``None``).
    """
    k, m = len(data.districts), len(data.alternatives)
    d_id = {name: i for i, name in enumerate(data.districts)}
    a_id = {name: i for i, name in enumerate(data.alternatives)}
    if closest_q is not None:
        if closest_q < 1:
            raise MalformedInputError("closest_q must be positive")
        if closest_q > k:
            warnings.warn(f"closest_q={closest_q} exceeds {k} districts; clamped", stacklevel=2)
            closest_q = k
        if locations is None:
            raise MalformedInputError("closest_q needs district locations")
        missing = [d for d in data.districts if d not in locations]
        if missing:
            raise MalformedInputError(f"no location for district(s) {', '.join(missing)}")
        near = closest_districts(data.districts, locations, closest_q)
    else:
        near = [frozenset(range(k))] * k

    rng = np.random.default_rng(seed)
    counts = []
    for rec in data.records:
        c = rec.count
        if sample_rate is not None:
            c = int(rng.binomial(c, sample_rate))
        counts.append((d_id[rec.district], a_id[rec.alternative], c))
    popularity = [0] * m
    for _, a, c in counts:
        popularity[a] += c
    global_order = sorted(range(m), key=lambda a: (-popularity[a], a))
    counts.sort()  # district-major, then alternative id
    voters, initial, mobility = [], [], []
    for d, a, c in counts:
        pref = (a, *[b for b in global_order if b != a])
        for _ in range(c):
            voters.append(Voter(len(voters), pref))
            initial.append(d)
            mobility.append(near[d])
    return DistrictingInstance(
        m=m,
        voters=tuple(voters),
        k=k,
        initial=Assignment(tuple(initial)),
        mobility=tuple(mobility),
        s_min=s_min,
        s_max=s_max,
        semantics=MovSemantics.parse(semantics),
        alternative_names=tuple(data.alternatives),
        district_names=tuple(data.districts),
        metadata={"sample_rate": sample_rate, "seed": seed, "closest_q": closest_q},
    )


# ---------------------------------------------------------------------------
# native JSON instance format


def instance_to_dict(instance: DistrictingInstance) -> dict:
    voters = []
    for v, voter in enumerate(instance.voters):
        entry = {
            "id": v,
            "top_choice": voter.top,
            "district": instance.initial[v],
            "mobility": sorted(instance.mobility[v]),
        }
        if len(voter.preference) > 1:
            entry["preference"] = list(voter.preference)
        voters.append(entry)
    out: dict = {
        "m": instance.m,
        "k": instance.k,
        "semantics": instance.semantics.value,
        "s_min": instance.s_min,
        "s_max": instance.s_max,
        "voters": voters,
    }
    if instance.graph is not None:
        out["edges"] = [list(e) for e in sorted(instance.graph.edges)]
    if instance.target is not None:
        out["target"] = instance.target
    if instance.alternative_names is not None:
        out["alternatives"] = list(instance.alternative_names)
    if instance.district_names is not None:
        out["districts"] = list(instance.district_names)
    return out


def instance_from_dict(data: dict) -> DistrictingInstance:
    try:
        m, k = int(data["m"]), int(data["k"])
        raw = sorted(data["voters"], key=lambda e: int(e["id"]))
        voters, initial, mobility = [], [], []
        for entry in raw:
            pref = entry.get("preference") or [entry["top_choice"]]
            if int(pref[0]) != int(entry["top_choice"]):
                raise MalformedInputError(f"voter {entry['id']}: preference disagrees with top_choice")
            voters.append(Voter(int(entry["id"]), tuple(int(p) for p in pref)))
            initial.append(int(entry["district"]))
            mobility.append(frozenset(int(d) for d in entry.get("mobility", range(k))))
        graph = None
        if data.get("edges") is not None:
            graph = VoterGraph.from_edges(len(voters), data["edges"])
        s_max = data.get("s_max")
        return DistrictingInstance(
            m=m,
            voters=tuple(voters),
            k=k,
            initial=Assignment(tuple(initial)),
            mobility=tuple(mobility),
            s_min=int(data.get("s_min", 0)),
            s_max=None if s_max is None else int(s_max),
            graph=graph,
            semantics=MovSemantics.parse(data.get("semantics", "set-change")),
            target=data.get("target"),
            alternative_names=tuple(data["alternatives"]) if "alternatives" in data else None,
            district_names=tuple(data["districts"]) if "districts" in data else None,
        )
    except (KeyError, TypeError) as exc:
        raise MalformedInputError(f"bad instance file: {exc!r}") from None


def save_instance(instance: DistrictingInstance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance)) + "\n", encoding="utf-8")


def load_instance(path: str | Path) -> DistrictingInstance:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    return instance_from_dict(data)
