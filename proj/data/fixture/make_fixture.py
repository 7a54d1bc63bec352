#!/usr/bin/env python3
"""Regenerates the bundled release fixture (deterministic).

Ten historical releases 3.6.3..5.0.6 with resolved issues, RT samples per
release (7 pages x 25 readings, 64-bit, plus a few 32-bit runs), a pool of
unresolved issues, four combos over 6.0.0..7.5.1, and a sizing corpus.
"""

import csv
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent
IF = {"critical": 1.0, "major": 0.75, "medium": 0.5, "minor": 0.25}

# (story points, impact, sign, kind, title)
HISTORY = {
    "3.6.3": [
        (8, "critical", "+", "enhancement", "Add attachment indexing to bug search"),
        (8, "critical", "+", "enhancement", "Dependency graph rendering for bug lists"),
        (8, "major", "+", "enhancement", "Flag requests workflow for reviews"),
        (5, "critical", "+", "fault", "Server overloaded under peak traffic on buglist"),
        (5, "major", "+", "enhancement", "Custom fields shown on bug page"),
        (5, "medium", "+", "fault", "Slow query when sorting by assignee in database"),
        (3, "major", "+", "fault", "Network timeout on attachment upload"),
        (2, "minor", "+", "enhancement", "Saved searches in footer"),
        (1, "critical", "+", "fault", "Session cookie misconfiguration forces re-login"),
    ],
    "4.4.0": [
        (2, "medium", "+", "enhancement", "Tag cloud on the home page"),
        (1, "critical", "-", "fault", "Cache template compilation to avoid repeated parsing"),
    ],
    "4.4.9": [(1, "minor", "+", "fault", "Extra audit log write on comment save")],
    "5.0.0": [
        (3, "minor", "+", "enhancement", "New skin with larger stylesheets"),
        (3, "minor", "-", "enhancement", "Minify javascript bundles"),
    ],
    "5.0.1": [(3, "minor", "+", "fault", "Duplicate detection query runs on every submit")],
    "5.0.2": [(5, "medium", "-", "fault", "Index on bugs table speeds up search in database")],
    "5.0.3": [(3, "major", "+", "enhancement", "Inline history view loads all activity rows")],
    "5.0.4": [(1, "major", "-", "enhancement", "Remove graphical report from the default view")],
    "5.0.5": [
        (1, "minor", "-", "fault", "Trim whitespace handling in search parser"),
        (1, "minor", "-", "fault", "Drop unused configuration lookups on page load"),
    ],
    "5.0.6": [],
}
REPORTED = {"3.6.3": "3.6.0", "4.4.0": "4.2.0", "4.4.9": "4.4.0"}

# Future pool, grouped by the release content the combos move around.
POOL = {
    "G19": [
        (8, "critical", "+", "enhancement", "Real-time notifications over websockets"),
        (5, "major", "+", "enhancement", "Full-text search across comments"),
        (3, "medium", "+", "enhancement", "Per-user dashboard widgets"),
        (5, "critical", "+", "enhancement", "REST API for bulk bug edits"),
        (3, "major", "+", "fault", "Server overloaded when many users poll the API"),
        (2, "medium", "-", "fault", "Reduce database round trips on bug view"),
        (1, "medium", "-", "fault", "Compress static assets on the web server"),
    ],
    "Gm425": [
        (3, "major", "-", "fault", "Query plan fix for the duplicate finder"),
        (2, "medium", "-", "fault", "Connection pool tuning for the database"),
        (1, "major", "-", "fault", "Lazy-load attachments on bug page"),
        (1, "medium", "-", "fault", "Cache product and component lists"),
        (1, "minor", "-", "fault", "Remove debug logging from request handler"),
        (1, "medium", "+", "enhancement", "Show reporter avatar in comments"),
    ],
    "G4": [
        (5, "medium", "+", "enhancement", "Markdown rendering for comments"),
        (2, "major", "+", "enhancement", "Keyboard shortcuts on bug list"),
    ],
    "G2": [(8, "minor", "+", "enhancement", "Theme editor for administrators")],
    "G3": [(3, "critical", "+", "enhancement", "Audit trail for every field change")],
    "G1675": [
        (8, "critical", "+", "enhancement", "Multi-tenant product hierarchy"),
        (8, "major", "+", "enhancement", "Timeline view of bug activity"),
        (5, "minor", "+", "enhancement", "Export bug lists to spreadsheet"),
        (3, "medium", "+", "fault", "Network retries on mail delivery failures"),
    ],
}
UNSIZED = [
    ("enhancement", "Fix typo in login page label", "minor", "+"),
    ("enhancement", "Redesign the search architecture with a new indexing service and migration", "major", "+"),
]

FUTURE = ["6.0.0", "6.5.0", "6.5.1", "7.0.0", "7.5.0", "7.5.1"]
COMBOS = {
    "Combo-1": ["G19", "Gm425", "G4", "G2", "G3", "G1675"],
    "Combo-2": ["G19", "G1675", "Gm425", "G4", "G2", "G3"],
    "Combo-3": ["G4", "G19", "G1675", "Gm425", "G2", "G3"],
    "Combo-4": ["G3", "Gm425", "G19", "G1675", "G4", "G2"],
}

# Overall mean RT (ms) per historical release.
RT_TARGET = {
    "3.6.3": 5475, "4.4.0": 5462, "4.4.9": 5497, "5.0.0": 5508, "5.0.1": 5611,
    "5.0.2": 5416, "5.0.3": 5579, "5.0.4": 5468, "5.0.5": 5452, "5.0.6": 5441,
}
PAGES = ["Home", "Search", "BugList", "ShowBug", "NewBug", "Reports", "Admin"]
PAGE_OFFSET = [-900, 700, 1100, -200, 300, 400, -1400]  # sums to 0
READINGS = 25
EXTRA_32BIT = ["4.4.0", "5.0.1", "5.0.4"]


def descr(title):
    return title + "."


def issues_rows():
    rows = []
    n = 0
    for release, items in HISTORY.items():
        for sp, impact, sign, kind, title in items:
            n += 1
            rows.append({
                "id": f"BZ-{1000 + n}", "kind": kind, "title": title, "description": descr(title),
                "reported_release": REPORTED.get(release, release), "resolved_release": release,
                "category": "", "subcategory": "", "impact": impact, "story_points": str(sp), "sign": sign,
            })
    pool_ids = {}
    for group, items in POOL.items():
        ids = []
        for sp, impact, sign, kind, title in items:
            n += 1
            iid = f"BZ-{1000 + n}"
            ids.append(iid)
            rows.append({
                "id": iid, "kind": kind, "title": title, "description": descr(title),
                "reported_release": "5.0.6", "resolved_release": "", "category": "", "subcategory": "",
                "impact": impact, "story_points": str(sp), "sign": sign,
            })
        pool_ids[group] = ids
    for kind, title, impact, sign in UNSIZED:
        n += 1
        rows.append({
            "id": f"BZ-{1000 + n}", "kind": kind, "title": title, "description": descr(title),
            "reported_release": "5.0.6", "resolved_release": "", "category": "", "subcategory": "",
            "impact": impact, "story_points": "", "sign": sign,
        })
    return rows, pool_ids


def split_sum(rng, total, count, spread):
    """`count` integers around total/count that sum exactly to `total`."""
    base = total // count
    vals = [base + rng.randint(-spread, spread) for _ in range(count)]
    diff = total - sum(vals)
    i = 0
    while diff != 0:
        step = 1 if diff > 0 else -1
        vals[i % count] += step
        diff -= step
        i += 1
    return vals


def rt_rows(rng):
    rows = []
    for release, target in RT_TARGET.items():
        envs = [("64-bit", target)]
        if release in EXTRA_32BIT:
            envs.append(("32-bit", target + 650))
        for env, mean in envs:
            for page, offset in zip(PAGES, PAGE_OFFSET):
                for ms in split_sum(rng, (mean + offset) * READINGS, READINGS, 120):
                    rows.append([release, page, env, str(ms)])
    return rows


CORPUS_PHRASES = {
    1: ["fix typo in {x} label", "change {x} button color", "update tooltip text on {x}",
        "correct spelling in {x} message", "rename {x} link"],
    2: ["add validation message to {x} form", "show count on {x} list", "small layout fix for {x} page",
        "add default value for {x} field", "sort {x} dropdown alphabetically"],
    3: ["optimize query for {x} page", "add filter options to {x} search", "paginate {x} results",
        "add export button for {x} report", "cache {x} lookups per request"],
    5: ["refactor {x} module for caching", "rewrite {x} rendering with templates",
        "introduce background job for {x} processing", "add api endpoints for {x} management",
        "replace {x} storage layer queries"],
    8: ["redesign {x} architecture with new service", "migrate {x} data to new schema",
        "rebuild {x} indexing engine", "split {x} into separate service with migration",
        "new plugin framework for {x} architecture"],
}
NOUNS = ["login", "bug", "search", "comment", "attachment", "product", "component", "user", "report", "admin",
         "dashboard", "notification"]


def corpus_rows(rng):
    rows = []
    for sp, phrases in CORPUS_PHRASES.items():
        for i in range(12):
            phrase = phrases[i % len(phrases)]
            rows.append([phrase.format(x=rng.choice(NOUNS)), str(sp)])
    rng.shuffle(rows)
    return rows


def main():
    rng = random.Random(20240605)
    rows, pool_ids = issues_rows()
    fields = ["id", "kind", "title", "description", "reported_release", "resolved_release", "category",
              "subcategory", "impact", "story_points", "sign"]
    with open(HERE / "issues.csv", "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)

    with open(HERE / "rt_samples.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["release", "page", "environment", "sample_ms"])
        w.writerows(rt_rows(rng))

    combos = []
    for label, groups in COMBOS.items():
        combos.append({"label": label,
                       "releases": [{"version": v, "issues": pool_ids[g]} for v, g in zip(FUTURE, groups)]})
    with open(HERE / "combos.json", "w") as f:
        json.dump({"threshold_ms": 9000, "combos": combos}, f, indent=2)
        f.write("\n")

    with open(HERE / "corpus.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["text", "story_points"])
        w.writerows(corpus_rows(rng))

    # cross-check the hand-designed deltas
    for group, items in POOL.items():
        total = sum(sp * IF[imp] * (1 if s == "+" else -1) for sp, imp, s, _, _ in items)
        print(f"{group}: {total:+g}")


if __name__ == "__main__":
    main()
