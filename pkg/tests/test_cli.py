import json
import hashlib

import pytest
from click.testing import CliRunner

from microar import package
from microar.cli import main

BUILD_SCRIPT = """\
metadata:
  creator: alice
  title: don and the windmill
  description: a knight charges a windmill
  created_at: 1610000000
scenes:
  - objects:
      - asset: knight
        position: [0.5, 0, 0]
        dialog: {text: "Charge!"}
      - asset: windmill
        position: [-0.5, 0, 0]
        scale: 1.5
  - objects:
      - asset: knight
        position: [0, 0, 0.3]
  - objects:
      - asset: knight
        position: [0, 0, -0.4]
  - objects:
      - asset: windmill
        position: [0.2, 0, 0]
  - objects:
      - asset: knight
        position: [0.1, 0, 0.1]
        dialog: {preset: screech}
"""

ADD_SCENE_EDITS = """\
title: don, with a robot cat
description: the remix adds a friend
created_at: 1610000500
add_scenes:
  - objects:
      - asset: robot cat
        position: [0.4, 0, 0.4]
"""


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workspace(tmp_path, runner):
    script = tmp_path / "story.yaml"
    script.write_text(BUILD_SCRIPT)
    edits = tmp_path / "edits.yaml"
    edits.write_text(ADD_SCENE_EDITS)
    return tmp_path


def run_ok(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


class TestOffline:
    def test_build_outputs_package_path(self, runner, workspace):
        out = workspace / "story.mar"
        result = run_ok(
            runner,
            ["build", str(workspace / "story.yaml"), "-o", str(out), "--catalog", str(workspace / "cat")],
        )
        assert result.output.strip().endswith("story.mar")
        story = package.decode(out.read_bytes())
        assert len(story.scenes) == 5

    def test_build_same_script_byte_identical(self, runner, workspace):
        a, b = workspace / "a.mar", workspace / "b.mar"
        run_ok(runner, ["build", str(workspace / "story.yaml"), "-o", str(a), "--catalog", str(workspace / "cat")])
        run_ok(runner, ["build", str(workspace / "story.yaml"), "-o", str(b), "--catalog", str(workspace / "cat")])
        assert a.read_bytes() == b.read_bytes()

    def test_build_script_error_is_machine_parseable(self, runner, workspace):
        bad = workspace / "bad.yaml"
        bad.write_text(BUILD_SCRIPT.replace("asset: knight", "asset: nonexistent-thing", 1))
        result = runner.invoke(
            main, ["build", str(bad), "--catalog", str(workspace / "cat")]
        )
        assert result.exit_code == 1
        error_line = result.output.strip().splitlines()[-1]
        parsed = json.loads(error_line)
        assert parsed["error"] == "script"
        assert "nonexistent-thing" in parsed["detail"]

    def test_validate_draft_vs_publish(self, runner, workspace):
        draft_script = workspace / "draft.yaml"
        draft_script.write_text("metadata: {creator: a}\nscenes:\n  - objects: []\n")
        out = workspace / "draft.mar"
        run_ok(runner, ["build", str(draft_script), "-o", str(out), "--catalog", str(workspace / "cat")])
        assert runner.invoke(main, ["validate", str(out)]).exit_code == 0
        result = runner.invoke(main, ["validate", str(out), "--publish"])
        assert result.exit_code == 1

    def test_inspect_prints_story_id_last(self, runner, workspace):
        out = workspace / "story.mar"
        run_ok(runner, ["build", str(workspace / "story.yaml"), "-o", str(out), "--catalog", str(workspace / "cat")])
        result = run_ok(runner, ["inspect", str(out)])
        story = package.decode(out.read_bytes())
        assert result.output.strip().splitlines()[-1] == package.story_id(story)

    def test_render_writes_svg(self, runner, workspace):
        out = workspace / "story.mar"
        svg = workspace / "scene.svg"
        run_ok(runner, ["build", str(workspace / "story.yaml"), "-o", str(out), "--catalog", str(workspace / "cat")])
        run_ok(runner, ["render", str(out), "--scene", "0", "-o", str(svg), "--catalog", str(workspace / "cat")])
        assert svg.read_text().startswith("<?xml")

    def test_render_bad_scene_index_exits_not_found(self, runner, workspace):
        out = workspace / "story.mar"
        run_ok(runner, ["build", str(workspace / "story.yaml"), "-o", str(out), "--catalog", str(workspace / "cat")])
        result = runner.invoke(main, ["render", str(out), "--scene", "9"])
        assert result.exit_code == 3

    def test_dialogs_lists_presets(self, runner):
        result = run_ok(runner, ["dialogs"])
        assert "VROOM" in result.output
        assert "Zzzz" in result.output


class TestAgainstServer:
    def test_full_remix_flow(self, runner, workspace, live_server):
        cat = str(workspace / "cat")
        out = workspace / "story.mar"
        run_ok(runner, ["build", str(workspace / "story.yaml"), "-o", str(out), "--catalog", cat])

        first = run_ok(runner, ["publish", str(out), "--server", live_server.url])
        story_id = first.output.strip().splitlines()[-1]

        # publishing again prints the same id and notes the duplicate
        again = run_ok(runner, ["publish", str(out), "--server", live_server.url])
        assert again.output.strip().splitlines()[-1] == story_id
        assert "already published" in again.output

        # remix: fetch + derive + edits + build
        remix_out = workspace / "remix.mar"
        run_ok(
            runner,
            [
                "remix", story_id, "--edits", str(workspace / "edits.yaml"), "--creator", "paula",
                "-o", str(remix_out), "--server", live_server.url, "--catalog", cat,
            ],
        )
        remix_story = package.decode(remix_out.read_bytes())
        assert len(remix_story.scenes) == 6  # five original scenes plus the new one
        assert remix_story.metadata.parent_story == story_id

        remix_id = run_ok(runner, ["publish", str(remix_out), "--server", live_server.url]).output.strip()

        lineage_result = run_ok(runner, ["lineage", remix_id, "--server", live_server.url])
        lines = lineage_result.output.strip().splitlines()
        assert lines[-1] == remix_id
        assert len(lines) == 3  # two chain entries plus the final id line
        assert story_id in lines[0]

        browse_result = run_ok(runner, ["browse", "--server", live_server.url])
        assert story_id in browse_result.output
        assert "(remix)" in browse_result.output

        stats_result = run_ok(runner, ["stats", "--server", live_server.url])
        stats = json.loads(stats_result.output.strip())
        assert stats["total_stories"] == 2
        assert stats["remix_count"] == 1

    def test_fetch_roundtrip_byte_identical(self, runner, workspace, live_server):
        cat = str(workspace / "cat")
        out = workspace / "story.mar"
        run_ok(runner, ["build", str(workspace / "story.yaml"), "-o", str(out), "--catalog", cat])
        story_id = run_ok(runner, ["publish", str(out), "--server", live_server.url]).output.strip()
        fetched = workspace / "fetched.mar"
        run_ok(runner, ["fetch", story_id, "-o", str(fetched), "--server", live_server.url])
        assert fetched.read_bytes() == out.read_bytes()
        assert hashlib.sha256(fetched.read_bytes()).hexdigest() == story_id

    def test_not_found_exit_code(self, runner, live_server):
        result = runner.invoke(main, ["fetch", "0" * 64, "--server", live_server.url])
        assert result.exit_code == 3

    def test_network_failure_exit_code(self, runner, workspace):
        out = workspace / "story.mar"
        run_ok(runner, ["build", str(workspace / "story.yaml"), "-o", str(out), "--catalog", str(workspace / "cat")])
        result = runner.invoke(main, ["publish", str(out), "--server", "http://127.0.0.1:1"])
        assert result.exit_code == 2

    def test_invalid_publish_exit_code(self, runner, workspace, live_server):
        draft_script = workspace / "draft.yaml"
        draft_script.write_text("metadata: {creator: a}\nscenes:\n  - objects: []\n")
        out = workspace / "draft.mar"
        run_ok(runner, ["build", str(draft_script), "-o", str(out), "--catalog", str(workspace / "cat")])
        result = runner.invoke(main, ["publish", str(out), "--server", live_server.url])
        assert result.exit_code == 1
