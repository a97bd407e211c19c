import json

from geocentroid.registry import OrgRecord, OrgRegistry
from geocentroid.synth import SynthConfig, write_publications, write_registry


def make_registry(*rows):
    """rows: (org_id, lat, lon)"""
    return OrgRegistry.from_records(OrgRecord(oid, oid, lat, lon) for oid, lat, lon in rows)


def pub_line(pub_id, year, authors, **extra):
    rec = {"id": pub_id, "year": year, "authors": [{"org_ids": a} for a in authors]}
    rec.update(extra)
    return json.dumps(rec)


def write_lines(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path


def synth_dataset(tmp_path, plan, seed=7, **kw):
    cfg = SynthConfig(seed=seed, plan=plan, **kw)
    reg = tmp_path / "registry.csv"
    pubs = tmp_path / "pubs.jsonl"
    with open(reg, "w", encoding="utf-8", newline="") as fh:
        write_registry(cfg, fh)
    with open(pubs, "w", encoding="utf-8", newline="") as fh:
        write_publications(cfg, fh)
    return reg, pubs
