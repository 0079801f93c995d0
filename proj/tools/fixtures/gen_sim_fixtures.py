#!/usr/bin/env python3
"""Regenerates the scripted simulator fixtures from the curated URL lists.

Outputs (under fixtures/):
  census.sim.json   SimConfig whose scripted outcomes give the 815-entry
                           population a 449/186/43/137 split over 200/301/302/blank.
  triage_registry.json   availability map for the 45-domain blank-stratum sample
                           (24 available for registration, 21 registered without A).

Domains that appear in the stratum sample lists keep the class of their list;
the remaining domains are assigned with a seeded shuffle. Run from the repo root.
"""
import json
import random
import re
from collections import Counter, OrderedDict
from pathlib import Path

FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"
TARGETS = {"200": 449, "301": 186, "302": 43, "0": 137}
SAMPLES = {
    "200": "sample_ok200.tsv",
    "301": "sample_moved301.tsv",
    "0": "sample_blank0.tsv",
    "302": "sample_found302.tsv",
}
BLOCK_IP = "198.51.100.1"
BLOCK_BODY = (
    "<html><head><title>Web Page Blocked!</title></head><body>"
    "<h1>Web Page Blocked!</h1><p>Access to this address is restricted on this network.</p>"
    "</body></html>"
)
SEED = 815


def host(url):
    return re.match(r"^https?://([^/:]+)", url).group(1).lower()


def read_list(name):
    rows = []
    for line in (FIXTURES / name).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        rows.append((parts[1], float(parts[2]) if len(parts) > 2 else None))
    return rows


def main():
    population = [host(u) for u, _ in read_list("urls_curated.txt")]
    mult = Counter(population)
    order = list(OrderedDict.fromkeys(population))

    cls, latency = {}, {}
    for label, fname in SAMPLES.items():
        for url, t in read_list(fname):
            d = host(url)
            if d in mult and d not in cls:
                cls[d] = label
                latency[d] = t

    remaining = {k: v - sum(mult[d] for d, c in cls.items() if c == k) for k, v in TARGETS.items()}
    free = [d for d in order if d not in cls]
    rng = random.Random(SEED)
    rng.shuffle(free)
    # multi-listed domains first so single entries can fill exact remainders
    free.sort(key=lambda d: -mult[d])
    for d in free:
        for label in ("200", "301", "0", "302"):
            if remaining[label] >= mult[d]:
                cls[d] = label
                remaining[label] -= mult[d]
                break
        else:
            raise SystemExit(f"cannot place {d}")
    assert all(v == 0 for v in remaining.values()), remaining
    counts = Counter()
    for d in population:
        counts[cls[d]] += 1
    assert dict(counts) == TARGETS, counts

    triage = [host(u) for u, _ in read_list("sample_blank0.tsv")]
    no_a = set(triage[24:])

    zone, scripted, blocklist = {}, {}, []
    next_ip = 0
    for d in order:
        label = cls[d]
        t = latency.get(d)
        if t is None:
            t = round(0.01 + (rng.random() * 0.34), 6)
        if label == "0":
            if d in no_a:
                zone[d] = []
            continue
        zone[d] = [f"198.18.{next_ip // 254}.{next_ip % 254 + 1}"]
        next_ip += 1
        if label == "200":
            blocklist.append(d)
            scripted[d] = {"status": 200, "latency": t}
        else:
            scripted[d] = {"status": int(label), "latency": t}

    config = OrderedDict(
        schema_version=1,
        block_server_ip=BLOCK_IP,
        block_page_status=200,
        block_page_body=BLOCK_BODY,
        intercept_mode="bogus_ip",
        intercept_enabled={"isp": True, "reference": False, "tor": False, "opera": False},
        blocklist=sorted(blocklist),
        upstream_zone=dict(sorted(zone.items())),
        scripted_http=dict(sorted(scripted.items())),
    )
    (FIXTURES / "census.sim.json").write_text(json.dumps(config, indent=2) + "\n")

    registry = OrderedDict()
    for i, d in enumerate(triage):
        if i < 24:
            registry[d] = {"available": True, "a_records": []}
        elif i % 3 == 0:
            registry[d] = {"available": False, "a_records": [], "mx_records": [f"mx1.{d}"]}
        else:
            registry[d] = {"available": False, "a_records": []}
    (FIXTURES / "triage_registry.json").write_text(json.dumps(registry, indent=2) + "\n")
    print(dict(counts), len(registry))


if __name__ == "__main__":
    main()
