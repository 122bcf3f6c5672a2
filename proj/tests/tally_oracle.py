#!/usr/bin/env python3
"""Cross-checks CLI scene counts against a tally computed straight from the diary file."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

FRUITS = {
    "diary-default": lambda t: {"not at all": 0, "not much": 0, "somewhat": 1, "very much": 2}.get(t.get("liking")),
    "liking-tenure": lambda t: {"male": 1, "female": 2}.get(t.get("gender")),
}


def mappable(preset, t):
    if preset == "diary-default":
        return t.get("gender") in ("male", "female") and "age" in t and "years_known" in t and "liking" in t
    return t.get("liking") in ("somewhat", "very much") and "age" in t and t.get("gender") in ("male", "female")


def in_period(date, period):
    if period is None:
        return True
    return date[:4] == period


def tally(diary, ego, preset, period):
    curves, leaves, fruits = 0, 0, 0
    for tie in diary["ties"]:
        if tie["ego_id"] != ego:
            continue
        attrs = tie.get("attributes", {})
        contacts = [c for c in diary["contacts"] if c["tie_id"] == tie["id"]
                    and in_period(c["attributes"]["date"], period)]
        if period is not None and not contacts:
            continue
        if not mappable(preset, attrs):
            continue
        curves += 1
        fruits += FRUITS[preset](attrs)
        leaves += sum(1 for c in contacts if "duration" in c["attributes"] and "feeling" in c["attributes"])
    return curves, leaves, fruits


def main():
    cli, data = sys.argv[1], sys.argv[2]
    diary = json.loads(Path(data).read_text())
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for ego in [e["id"] for e in diary["egos"]]:
            for preset in FRUITS:
                for period in (None, "2004", "2008"):
                    out = Path(tmp) / "scene.json"
                    cmd = [cli, "render", "--data", data, "--ego", ego, "--mapping", preset,
                           "--format", "json", "--out", str(out)]
                    if period:
                        cmd += ["--period", period]
                    subprocess.run(cmd, check=True, capture_output=True)
                    scene = json.loads(out.read_text())
                    got = (len(scene["curves"]), len(scene["leaves"]), len(scene["fruits"]))
                    want = tally(diary, ego, preset, period)
                    status = "ok" if got == want else "MISMATCH"
                    failures += got != want
                    print(f"{status} {ego} {preset} {period or 'all'}: got {got}, want {want}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
