#!/usr/bin/env python3
"""Writes diary_small.json and the equivalent diary_small_csv/ tables."""
import csv
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))

EGOS = [
    ("E1", {"gender": "female", "age": 25, "marital_status": "single"}),
    ("E2", {"gender": "male", "age": 41, "marital_status": "married"}),
    ("E3", {"gender": "female", "age": 33, "marital_status": "married"}),
]

# id, ego, attributes, contacts [(date, duration, feeling)]
TIES = [
    ("T1", "E1", {"gender": "male", "age": 23, "years_known": 8.0, "is_stranger": False,
                  "liking": "very much"},
     [("2004-01-05", 30.0, "better"), ("2004-02-11", 90.0, "much better"),
      ("2008-01-20", 45.0, "same"), ("2008-03-02", 10.0, "better")]),
    ("T2", "E1", {"gender": "female", "age": 52, "years_known": 2.5, "is_stranger": False,
                  "liking": "somewhat"},
     [("2004-01-09", 15.0, "same"), ("2004-03-14", 60.0, "worse"),
      ("2008-02-07", 20.0, "same")]),
    ("T3", "E1", {"gender": "male", "age": 67, "years_known": 30.0, "is_stranger": False,
                  "liking": "not much"},
     [("2004-02-01", 5.0, "much worse"), ("2004-02-20", 120.0, "same")]),
    ("T4", "E1", {"gender": "female", "age": 19, "years_known": 0.0, "is_stranger": True,
                  "liking": "not at all"},
     [("2004-03-30", 2.0, "same"), ("2008-03-15", 3.0, "worse")]),
    ("T5", "E2", {"gender": "male", "age": 44, "years_known": 20.0, "is_stranger": False,
                  "liking": "very much"},
     [("2004-01-02", 60.0, "better"), ("2004-01-16", 30.0, "better"),
      ("2004-02-03", 45.0, "same"), ("2004-03-01", 75.0, "much better")]),
    ("T6", "E2", {"gender": "female", "age": 38, "years_known": 12.0, "is_stranger": False,
                  "liking": "very much"},
     [("2004-01-03", 240.0, "much better"), ("2004-01-04", 180.0, "better"),
      ("2004-02-14", 200.0, "better"), ("2004-03-21", 150.0, "same")]),
    ("T7", "E2", {"age": 29, "years_known": 1.0, "is_stranger": False, "liking": "somewhat"},
     [("2004-02-09", 10.0, "same"), ("2004-03-10", 12.0, "same"),
      ("2004-03-11", 8.0, "worse")]),
    ("T8", "E2", {"gender": "female", "age": 71, "years_known": 41.0, "is_stranger": False,
                  "liking": "somewhat"},
     [("2004-01-25", 35.0, "better"), ("2004-02-25", 25.0, "same"),
      ("2004-03-25", 40.0, "better")]),
    ("T9", "E2", {"gender": "male", "age": 8, "years_known": 8.0, "is_stranger": False,
                  "liking": "very much"},
     [("2004-01-07", 90.0, "much better"), ("2004-01-14", 100.0, "much better"),
      ("2004-01-21", 80.0, "better")]),
    ("T10", "E3", {"gender": "male", "age": 35, "years_known": 10.0, "is_stranger": False,
                   "liking": "very much"},
     [("2004-01-01", 300.0, "much better"), ("2004-01-08", 280.0, "better"),
      ("2004-01-15", 320.0, "better"), ("2004-02-01", 260.0, "same"),
      ("2004-02-15", 310.0, "better")]),
    ("T11", "E3", {"gender": "female", "age": 60, "years_known": 33.0, "is_stranger": False,
                   "liking": "very much"},
     [("2004-01-12", 50.0, "better"), ("2004-02-12", 55.0, "better"),
      ("2004-03-12", 45.0, "same"), ("2004-03-28", 60.0, "much better")]),
    ("T12", "E3", {"gender": "female", "age": 30, "years_known": 0.5, "is_stranger": False,
                   "liking": "not much"},
     [("2004-02-17", 20.0, "worse"), ("2004-02-18", 25.0, "much worse"),
      ("2004-03-03", 15.0, "same")]),
]

TIE_COLUMNS = ["gender", "age", "years_known", "is_stranger", "liking"]
CONTACT_COLUMNS = ["date", "duration", "feeling"]
EGO_COLUMNS = ["gender", "age", "marital_status"]


def cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def main():
    doc = {"egos": [], "ties": [], "contacts": []}
    tie_rows, contact_rows = [], []
    n = 0
    for ego, attrs in EGOS:
        doc["egos"].append({"id": ego, "attributes": attrs})
    for tie, ego, attrs, contacts in TIES:
        doc["ties"].append({"id": tie, "ego_id": ego, "attributes": attrs})
        tie_rows.append([tie, ego] + [cell(attrs.get(c)) for c in TIE_COLUMNS])
        for date, duration, feeling in contacts:
            n += 1
            cid = "C%d" % n
            doc["contacts"].append({"id": cid, "tie_id": tie, "attributes": {
                "date": date, "duration": duration, "feeling": feeling}})
            contact_rows.append([cid, tie, date, cell(duration), feeling])

    with open(os.path.join(HERE, "diary_small.json"), "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")

    out = os.path.join(HERE, "diary_small_csv")
    os.makedirs(out, exist_ok=True)

    def write(name, header, rows):
        with open(os.path.join(out, name), "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)

    write("egos.csv", ["id"] + EGO_COLUMNS,
          [[e] + [cell(a.get(c)) for c in EGO_COLUMNS] for e, a in EGOS])
    write("ties.csv", ["id", "ego_id"] + TIE_COLUMNS, tie_rows)
    write("contacts.csv", ["id", "tie_id"] + CONTACT_COLUMNS, contact_rows)


if __name__ == "__main__":
    main()
