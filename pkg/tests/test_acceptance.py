"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with `pytest tests/test_acceptance.py -v -s`).

Tolerances are pinned here and nowhere else: positions within one
micrometer quantum, quaternions within one nano quantum, clutter within
one sample of the 64x64 grid, statistics shares within 1e-4.
"""

import concurrent.futures
import hashlib
import math
import random
import time

import httpx
import pytest
from click.testing import CliRunner

from microar import package
from microar.catalog import AssetCatalog, install_builtin_assets
from microar.cli import main as cli_main
from microar.corpus import generate_corpus
from microar.layout import AnchorPose, clutter_ratio, compose, relative_to, scene_footprint
from microar.model import (
    Aabb,
    AssetRef,
    CameraPose,
    Metadata,
    PlacedObject,
    Plane,
    Scene,
    Story,
    random_id,
)
from microar.remix import derive_remix, diff

from conftest import random_story, random_transform
from golden import GOLDEN_STORY_ID, golden_story
from test_layout import clutter_oracle, cube_bounds, footprint_oracle, unit_box_object
from test_package import scrambled_variant

POS_TOL = 1e-6 + 1e-9
QUAT_TOL = 1e-9 + 1e-15


def _report(outcome: bool, name: str) -> bool:
    print(f"\n[{'PASS' if outcome else 'FAIL'}] {name}")
    return outcome


def test_c1_roundtrip_and_canonicalization():
    name = "round-trip & canonicalization: 1000 stories, scrambled inputs keep their ids, < 30 s"
    started = time.monotonic()
    rng = random.Random(101)
    ok = True
    for i in range(1000):
        story = random_story(rng, publishable=rng.random() < 0.7)
        data = package.encode(story)
        ok = ok and package.decode(data) == story
        if i % 10 == 0:
            variant = scrambled_variant(data)
            decoded = package.decode(variant)
            ok = ok and decoded == story and package.story_id(decoded) == package.story_id(story)
    elapsed = time.monotonic() - started
    ok = ok and elapsed < 30.0
    assert _report(ok, name), f"elapsed={elapsed:.1f}s"


def test_c2_layout_inverse_property():
    name = "layout inverse: 1000 (anchor, transform) pairs within 1e-6 m / 1e-9 quaternion"
    rng = random.Random(202)
    ok = True
    for _ in range(1000):
        plane = Plane(
            origin=(rng.uniform(-10, 10), rng.uniform(-2, 2), rng.uniform(-10, 10)),
            yaw=rng.uniform(-math.pi, math.pi),
            extents=(rng.uniform(0.5, 8), rng.uniform(0.5, 8)),
        )
        anchor = AnchorPose(
            plane=plane,
            position=(
                rng.uniform(-plane.extents[0] / 2, plane.extents[0] / 2),
                rng.uniform(-plane.extents[1] / 2, plane.extents[1] / 2),
            ),
            yaw=rng.uniform(-math.pi, math.pi),
        )
        t = random_transform(rng)
        recovered = relative_to(anchor, compose(anchor, t))
        ok = ok and all(abs(recovered.position[i] - t.position[i]) <= POS_TOL for i in range(3))
        ok = ok and all(abs(recovered.rotation[i] - t.rotation[i]) <= QUAT_TOL for i in range(4))
        ok = ok and recovered.scale == t.scale
    assert _report(ok, name)


def test_c3_footprint_oracle_equivalence():
    name = "footprint equals brute-force corner projection exactly on 200 scenes"
    rng = random.Random(303)
    ok = True
    for _ in range(200):
        objects = tuple(
            PlacedObject(
                object_id=random_id(rng),
                asset=AssetRef(f"box-{i}", "box"),
                transform=random_transform(rng),
            )
            for i in range(rng.randint(1, 10))
        )
        scene = Scene(scene_id=random_id(rng), index=0, objects=objects)
        boxes = {
            o.asset.asset_key: Aabb(
                tuple(rng.uniform(-1.5, 0) for _ in range(3)),
                tuple(rng.uniform(0, 1.5) for _ in range(3)),
            )
            for o in objects
        }
        bounds = lambda asset: boxes[asset.asset_key]  # noqa: E731
        ok = ok and scene_footprint(scene, bounds) == footprint_oracle(scene, bounds)
    assert _report(ok, name)


def test_c4_clutter_oracle():
    name = "clutter matches per-sample raycast oracle within 1/4096; empty=0, enclosing=1"
    rng = random.Random(404)
    camera = CameraPose(position=(0.0, 0.5, 3.0), vertical_fov=58.0, aspect=1.4)
    ok = clutter_ratio(camera, Scene(scene_id=random_id(rng), index=0), cube_bounds) == 0.0
    enclosing = Scene(
        scene_id=random_id(rng), index=0, objects=(unit_box_object(position=(0.0, 0.5, 3.0), scale=12.0),)
    )
    ok = ok and clutter_ratio(camera, enclosing, cube_bounds) == 1.0
    for _ in range(50):
        objects = tuple(
            unit_box_object(
                position=(rng.uniform(-3, 3), rng.uniform(-1, 2), rng.uniform(-8, 2)),
                yaw=rng.uniform(-math.pi, math.pi),
                scale=rng.uniform(0.2, 3.0),
            )
            for _ in range(rng.randint(1, 6))
        )
        scene = Scene(scene_id=random_id(rng), index=0, objects=objects)
        got = clutter_ratio(camera, scene, cube_bounds)
        want = clutter_oracle(camera, scene, cube_bounds)
        ok = ok and abs(got - want) <= 1 / 4096
    assert _report(ok, name)


def test_c5_paper_statistics_reproduction(live_server):
    name = (
        "statistics at desk scale: 194/48/11 corpus through the live service, "
        "ratios within 1e-4, histogram and asset counts exact, < 60 s"
    )
    started = time.monotonic()
    stories = generate_corpus(seed=7)
    with httpx.Client(base_url=live_server.url, timeout=30.0) as client:
        for story in stories:
            response = client.post(
                "/stories",
                content=package.encode(story),
                headers={"creator": story.metadata.creator},
            )
            assert response.status_code == 201, response.text
        stats = client.get("/stats").json()
    elapsed = time.monotonic() - started
    histogram = stats["scene_count_histogram"]
    ok = (
        stats["total_stories"] == 194
        and stats["remix_count"] == 48
        and stats["self_remix_count"] == 11
        and abs(stats["remix_ratio"] - 0.2474) <= 0.0001
        and abs(stats["self_remix_share"] - 0.2292) <= 0.0001
        and histogram["one_scene"] == round(0.26 * 146)
        and histogram["two_scenes"] == round(0.32 * 146)
        and histogram["three_plus"] == 146 - round(0.26 * 146) - round(0.32 * 146)
        and histogram["max_scenes"] == 10
        and stats["unique_assets"] == 325
        and stats["total_asset_instances"] == 1204
        and elapsed < 60.0
    )
    assert _report(ok, name), f"stats={stats}, elapsed={elapsed:.1f}s"


def test_c6_remix_end_to_end(live_server):
    name = "remix E2E: publish 5 scenes, remix +1 scene, lineage 2, diff shows the addition"
    rng = random.Random(606)
    scenes = tuple(
        Scene(
            scene_id=random_id(rng),
            index=i,
            objects=(
                PlacedObject(object_id=random_id(rng), asset=AssetRef(f"asset-{i}", "person")),
            ),
        )
        for i in range(5)
    )
    parent = Story(
        metadata=Metadata(creator="author-05", title="the five panels", description="d", created_at=50),
        scenes=scenes,
    )
    with httpx.Client(base_url=live_server.url, timeout=30.0) as client:
        parent_id = client.post(
            "/stories", content=package.encode(parent), headers={"creator": "author-05"}
        ).json()["story_id"]

        draft = derive_remix(parent, "author-14")
        new_scene = Scene(
            scene_id=random_id(rng),
            index=5,
            objects=(
                PlacedObject(object_id=random_id(rng), asset=AssetRef("asset-cat", "robot cat")),
            ),
        )
        remix_story = Story(
            metadata=Metadata(
                creator="author-14",
                title="the five panels, revisited",
                description="adds a sixth panel",
                original_creator=draft.metadata.original_creator,
                created_at=60,
                parent_story=draft.metadata.parent_story,
            ),
            scenes=draft.scenes + (new_scene,),
        )
        response = client.post(
            "/stories", content=package.encode(remix_story), headers={"creator": "author-14"}
        )
        assert response.status_code == 201, response.text
        remix_id = response.json()["story_id"]

        chain = client.get(f"/stories/{remix_id}/lineage").json()["lineage"]
        fetched_parent = package.decode(client.get(f"/stories/{parent_id}").content)
        fetched_remix = package.decode(client.get(f"/stories/{remix_id}").content)

    d = diff(fetched_parent, fetched_remix)
    ok = (
        [c["story_id"] for c in chain] == [parent_id, remix_id]
        and d.scenes_added == 1
        and d.scenes_removed == 0
        and d.objects_added == (new_scene.objects[0].object_id,)
        and d.objects_removed == ()
        and d.objects_transformed == ()
        and d.dialogs_edited == ()
        and not d.scenes_reordered
    )
    assert _report(ok, name), d


def test_c7_service_integrity_under_concurrency(live_server):
    name = "concurrency: 100 parallel fetches count exactly; parallel publishes store once"
    story = random_story(random.Random(707))
    data = package.encode(story)
    creator = story.metadata.creator
    with httpx.Client(base_url=live_server.url, timeout=30.0) as client:
        sid = client.post("/stories", content=data, headers={"creator": creator}).json()["story_id"]

        def fetch(_):
            with httpx.Client(base_url=live_server.url, timeout=30.0) as c:
                return c.get(f"/stories/{sid}").status_code

        with concurrent.futures.ThreadPoolExecutor(max_workers=20) as pool:
            statuses = list(pool.map(fetch, range(100)))
        views = client.get(f"/stories/{sid}/meta").json()["view_count"]

        other = random_story(random.Random(708))
        other_bytes = package.encode(other)

        def publish_once(_):
            with httpx.Client(base_url=live_server.url, timeout=30.0) as c:
                return c.post(
                    "/stories", content=other_bytes, headers={"creator": other.metadata.creator}
                ).json()

        with concurrent.futures.ThreadPoolExecutor(max_workers=16) as pool:
            bodies = list(pool.map(publish_once, range(24)))
        total = client.get("/stories").json()["total"]

    ok = (
        statuses == [200] * 100
        and views == 100
        and {b["story_id"] for b in bodies} == {package.story_id(other)}
        and sum(1 for b in bodies if b["created"]) == 1
        and total == 2
    )
    assert _report(ok, name), f"views={views}, total={total}"


def test_c8_cli_determinism_and_golden_fixture(tmp_path, live_server):
    name = "CLI determinism: build -> publish -> fetch -> re-encode byte-identical; golden hash stable"
    script = tmp_path / "story.yaml"
    script.write_text(
        """\
metadata:
  creator: alice
  title: determinism check
  description: built twice, fetched once
  created_at: 1610000000
scenes:
  - objects:
      - asset: person
        position: [0.5, 0, -0.25]
        dialog: {preset: vroom}
      - asset: piano
        position: [-0.5, 0, 0]
        scale: 1.25
"""
    )
    catalog_dir = tmp_path / "catalog"
    install_builtin_assets(AssetCatalog(catalog_dir))
    runner = CliRunner()

    built = tmp_path / "a.mar"
    rebuilt = tmp_path / "b.mar"
    for out in (built, rebuilt):
        result = runner.invoke(
            cli_main,
            ["build", str(script), "-o", str(out), "--catalog", str(catalog_dir)],
            catch_exceptions=False,
        )
        assert result.exit_code == 0, result.output
    ok = built.read_bytes() == rebuilt.read_bytes()

    publish_result = runner.invoke(
        cli_main, ["publish", str(built), "--server", live_server.url], catch_exceptions=False
    )
    ok = ok and publish_result.exit_code == 0
    story_id = publish_result.output.strip().splitlines()[-1]

    fetched = tmp_path / "fetched.mar"
    fetch_result = runner.invoke(
        cli_main,
        ["fetch", story_id, "-o", str(fetched), "--server", live_server.url],
        catch_exceptions=False,
    )
    ok = ok and fetch_result.exit_code == 0
    fetched_bytes = fetched.read_bytes()
    ok = ok and fetched_bytes == built.read_bytes()
    ok = ok and package.encode(package.decode(fetched_bytes)) == fetched_bytes

    # the committed golden package: bytes and hash must never drift
    golden_bytes = package.encode(golden_story())
    ok = ok and hashlib.sha256(golden_bytes).hexdigest() == GOLDEN_STORY_ID
    with open("tests/data/golden.mar", "rb") as f:
        ok = ok and f.read() == golden_bytes
    assert _report(ok, name)
