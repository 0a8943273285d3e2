#!/usr/bin/env python3
"""Smoke test for the xilab Python extension.

Builds nothing itself: run `cargo build -p xilab-py --release` (or a debug
build) first, then `python3 python/smoke_test.py`. The script copies the
compiled cdylib into a temporary directory under the importable name
`xilab.so` and exercises the main classes and report functions.
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def import_xilab():
    candidates = [
        REPO / "target" / profile / "libxilab.so"
        for profile in ("release", "debug")
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit(
            "libxilab.so not found; build it first with "
            "`cargo build -p xilab-py --release`"
        )
    newest = max(built, key=lambda p: p.stat().st_mtime)
    stage = Path(tempfile.mkdtemp(prefix="xilab-smoke-"))
    shutil.copy2(newest, stage / "xilab.so")
    sys.path.insert(0, str(stage))
    import xilab

    return xilab


checks = 0


def check(label, condition):
    global checks
    if not condition:
        sys.exit(f"[smoke] {label}: FAIL")
    checks += 1
    print(f"[smoke] {label}: ok")


def main():
    xilab = import_xilab()

    check("catalog names", "delta1" in xilab.catalog_names())

    site = xilab.Site.catalog("delta1")
    check("edge site shape", (site.object_count(), site.morphism_count()) == (2, 7))
    check("terminal object", site.terminal_object() == "[0]")
    check(
        "identity colimit is the terminal object",
        site.identity_colimit_vertex() == site.terminal_object(),
    )

    clf = site.classifier()
    check("classifier at [0]", clf.congruence_names("[0]") == ["total"])
    check(
        "classifier at [1]",
        clf.congruence_names("[1]") == ["non-loop", "loop", "total"],
    )

    picture = json.loads(xilab.classifier_picture_json())
    check(
        "classifier picture",
        picture["node_count"] == 1
        and picture["nondegenerate_edges"] == ["loop", "non-loop"],
    )

    probes = clf.probes()
    check("five probes", len(probes) == 5)
    check("four saturated", sum(p.is_saturated() for p in probes) == 4)

    unsaturated = clf.probe({"[0]": ["total"], "[1]": ["non-loop", "total"]})
    check("unsaturated probe detected", not unsaturated.is_saturated())
    check(
        "saturation closes upward",
        unsaturated.saturate().selection()["[1]"] == ["non-loop", "loop", "total"],
    )

    loop = xilab.loop_graph()
    check("loop measurement", loop.sigma() == {"l": "loop"})
    arrow = xilab.generic_arrow()
    check("arrow measurement", arrow.sigma() == {"a": "non-loop"})
    check(
        "arrow cohesion mismatch",
        len(arrow.points()) == 2
        and len(arrow.components()) == 1
        and not arrow.is_leibniz(),
    )

    x = loop.to_presheaf()
    check("loop has one point", len(x.points()) == 1)
    sigma = clf.sigma(x)
    check("presheaf measurement", sigma["[1]"]["l"] == "loop")
    check("petit hom of the loop", len(x.petit_hom(x)) == 1)

    collapse = xilab.collapse_to_loop()
    check("collapse is singular", not collapse.is_nonsingular())
    check("singular witness", collapse.singular_witness() == "a")
    q = collapse.to_presheaf_map()
    check("presheaf collapse is singular", not q.is_nonsingular())
    inclusion, restricted = q.coreflect()
    check(
        "coreflection keeps the endpoints",
        inclusion.source().carrier("[0]") == ["s", "t"]
        and restricted.is_nonsingular(),
    )

    check(
        "skeleton of the full probe is everything",
        clf.full_probe().skeleton(x)[0].total_size() == x.total_size(),
    )
    check("every map is cartesian for the full probe", clf.full_probe().is_cartesian(q))
    loop_probe = clf.probe({"[0]": ["total"], "[1]": ["loop", "total"]})
    check(
        "the singular collapse fails cartesianness",
        loop_probe.is_cartesian(q) is False,
    )

    check(
        "classify the loop's skeleton",
        loop.classify(["v"], []).edge_images()["l"] == "non-loop",
    )
    try:
        arrow.classify(["s", "t"], ["a"])
        sys.exit("[smoke] lightly dense rejection: FAIL (no error raised)")
    except ValueError:
        check("lightly dense rejection", True)

    census = json.loads(xilab.census_json(site))
    check("census", census["all_ok"] and census["probe_count"] == 5)

    shells = json.loads(xilab.shell_axioms_json(site))
    check(
        "shell axioms",
        all(r["pass"] for r in shells if r["saturated"])
        and all(r["mono_cartesian"] for r in shells),
    )

    sierpinski = json.loads(xilab.sierpinski_json(2))
    check("sierpinski identification", sierpinski["all_ok"])

    calibration = json.loads(xilab.calibration_json())
    check("calibration counterexample", calibration["reproduces_counterexample"])

    print(f"[smoke] all {checks} checks passed")


if __name__ == "__main__":
    main()
