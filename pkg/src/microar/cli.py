"""Command-line front door: build stories from scene scripts, validate and
inspect packages, render previews, and talk to a story repository.

Exit codes: 0 success, 1 validation problem, 2 IO or network failure,
3 not found. Every failure ends with one canonical-JSON error line on
stderr; successes end with the relevant id or path on stdout.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path
from typing import NoReturn, Optional

import click
import httpx

from . import catalog as catalog_mod
from . import layout, package, remix, render, script
from .canonical import canonical_dumps
from .model import ModelError, StoryValidationError, validate_story

EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_NOT_FOUND = 3

DEFAULT_SERVER = "http://127.0.0.1:8037"


def _fail(code: str, detail: str, exit_code: int) -> NoReturn:
    click.echo(canonical_dumps({"error": code, "detail": detail}), err=True)
    sys.exit(exit_code)


def _open_catalog(path: Optional[str]) -> catalog_mod.AssetCatalog:
    root = Path(path or os.environ.get("MICROAR_CATALOG", "microar-catalog"))
    cat = catalog_mod.AssetCatalog(root)
    if len(cat) == 0:
        catalog_mod.install_builtin_assets(cat)
    return cat


def _server_url(value: Optional[str]) -> str:
    return (value or os.environ.get("MICROAR_SERVER", DEFAULT_SERVER)).rstrip("/")


def _client(server: str) -> httpx.Client:
    return httpx.Client(base_url=server, timeout=30.0)


def _read_package(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        _fail("io", f"cannot read {path}: {exc}", EXIT_IO)


def _decode_or_fail(data: bytes):
    try:
        return package.decode(data)
    except package.PackageError as exc:
        _fail("invalid_package", str(exc), EXIT_VALIDATION)


def _surface_http_error(response: httpx.Response) -> None:
    """Surface a server error body verbatim with the matching exit code."""
    detail = response.text
    if response.status_code == 404:
        _fail("not_found", detail, EXIT_NOT_FOUND)
    if response.status_code in (400, 401, 403, 409, 422):
        _fail("rejected", detail, EXIT_VALIDATION)
    _fail("server_error", detail, EXIT_IO)


catalog_option = click.option("--catalog", "catalog_dir", default=None, help="Asset catalog directory.")
server_option = click.option("--server", default=None, help="Repository URL (or MICROAR_SERVER).")


@click.group()
def main() -> None:
    """Author, validate, publish, and remix micro AR stories."""


@main.command()
@click.argument("script_path", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", default=None, help="Output .mar path (default: script name).")
@catalog_option
def build(script_path: str, output: Optional[str], catalog_dir: Optional[str]) -> None:
    """Compile a scene script into a .mar package."""
    cat = _open_catalog(catalog_dir)
    text = Path(script_path).read_text("utf-8")
    try:
        story = script.compile_script(text, cat)
        data = package.encode(story)
    except script.ScriptError as exc:
        _fail("script", f"{script_path}:{exc.line or 0}: {exc.message}", EXIT_VALIDATION)
    except (ModelError, package.PackageError) as exc:
        _fail("invalid_story", str(exc), EXIT_VALIDATION)
    out = Path(output) if output else Path(script_path).with_suffix(package.FILE_EXTENSION)
    try:
        out.write_bytes(data)
    except OSError as exc:
        _fail("io", f"cannot write {out}: {exc}", EXIT_IO)
    click.echo(out)


@main.command()
@click.argument("package_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--publish", "publish_mode", is_flag=True, help="Check publish rules, not just draft ones.")
def validate(package_path: str, publish_mode: bool) -> None:
    """Decode a package and report rule violations."""
    story = _decode_or_fail(_read_package(package_path))
    violations = validate_story(story, "publish" if publish_mode else "draft")
    if violations:
        for v in violations:
            click.echo(f"{v.path}: {v.rule}: {v.detail}", err=True)
        _fail("invalid_story", f"{len(violations)} violation(s)", EXIT_VALIDATION)
    click.echo(package.story_id(story))


@main.command()
@click.argument("package_path", type=click.Path(exists=True, dir_okay=False))
def inspect(package_path: str) -> None:
    """Summarize a package: metadata, scenes, objects, dialogs."""
    data = _read_package(package_path)
    story = _decode_or_fail(data)
    meta = story.metadata
    click.echo(f"title:            {meta.title or '(untitled)'}")
    click.echo(f"creator:          {meta.creator}")
    click.echo(f"original creator: {meta.original_creator}")
    click.echo(f"created at:       {meta.created_at}")
    if meta.parent_story:
        click.echo(f"remix of:         {meta.parent_story}")
    if meta.placement_hints:
        hints = meta.placement_hints
        extents = f", needs {hints.min_extents[0]} x {hints.min_extents[1]} m" if hints.min_extents else ""
        click.echo(f"placement:        {hints.surface_class.value}{extents}")
    if package.is_draft(data):
        click.echo("draft:            yes")
    click.echo(f"scenes:           {len(story.scenes)}")
    for scene in story.scenes:
        names = ", ".join(o.asset.display_name for o in scene.objects) or "(empty)"
        click.echo(f"  scene {scene.index}: {len(scene.objects)} object(s): {names}")
    click.echo(package.story_id(story))


@main.command(name="render")
@click.argument("package_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--scene", "scene_index", default=0, show_default=True, help="Scene index to render.")
@click.option("-o", "--output", default=None, help="Output .svg path.")
@catalog_option
def render_cmd(package_path: str, scene_index: int, output: Optional[str], catalog_dir: Optional[str]) -> None:
    """Render a top-down SVG preview of one scene."""
    story = _decode_or_fail(_read_package(package_path))
    bounds = layout.unit_cube_bounds
    if catalog_dir is not None:
        cat = _open_catalog(catalog_dir)
        bounds = lambda asset: cat.bounds_for(asset.asset_key)  # noqa: E731
    try:
        svg = render.render_scene_svg(story, scene_index, bounds)
    except IndexError as exc:
        _fail("not_found", str(exc), EXIT_NOT_FOUND)
    out = Path(output) if output else Path(package_path).with_suffix(f".scene{scene_index}.svg")
    try:
        out.write_text(svg, encoding="utf-8")
    except OSError as exc:
        _fail("io", f"cannot write {out}: {exc}", EXIT_IO)
    click.echo(out)


@main.command()
@click.argument("package_path", type=click.Path(exists=True, dir_okay=False))
@server_option
def publish(package_path: str, server: Optional[str]) -> None:
    """Publish a package to the repository."""
    data = _read_package(package_path)
    story = _decode_or_fail(data)
    violations = validate_story(story, "publish")
    if violations:
        for v in violations:
            click.echo(f"{v.path}: {v.rule}: {v.detail}", err=True)
        _fail("invalid_story", f"{len(violations)} violation(s)", EXIT_VALIDATION)
    try:
        with _client(_server_url(server)) as client:
            response = client.post(
                "/stories",
                content=data,
                headers={"creator": story.metadata.creator, "content-type": package.MEDIA_TYPE},
            )
    except httpx.HTTPError as exc:
        _fail("network", str(exc), EXIT_IO)
    if response.status_code not in (200, 201):
        _surface_http_error(response)
    body = response.json()
    if not body.get("created", True):
        click.echo("note: identical story was already published", err=True)
    click.echo(body["story_id"])


@main.command()
@server_option
@click.option("--creator", default=None, help="Only list stories by this creator.")
@click.option("--page", default=1, show_default=True)
@click.option("--page-size", default=20, show_default=True)
def browse(server: Optional[str], creator: Optional[str], page: int, page_size: int) -> None:
    """List published stories, newest first."""
    params = {"page": page, "page_size": page_size}
    if creator:
        params["creator"] = creator
    try:
        with _client(_server_url(server)) as client:
            response = client.get("/stories", params=params)
    except httpx.HTTPError as exc:
        _fail("network", str(exc), EXIT_IO)
    if response.status_code != 200:
        _surface_http_error(response)
    body = response.json()
    for listing in body["stories"]:
        remix_marker = " (remix)" if listing.get("parent_story") else ""
        click.echo(
            f"{listing['story_id']}  {listing['scene_count']} scene(s)  {listing['view_count']} view(s)  "
            f"{listing['creator']}: {listing['title']}{remix_marker}"
        )
    click.echo(f"page {body['page']} ({len(body['stories'])} of {body['total']} stories)")


@main.command()
@click.argument("story_id")
@click.option("-o", "--output", default=None, help="Output .mar path (default: <id>.mar).")
@server_option
def fetch(story_id: str, output: Optional[str], server: Optional[str]) -> None:
    """Download a published package (counts as a view)."""
    try:
        with _client(_server_url(server)) as client:
            response = client.get(f"/stories/{story_id}")
    except httpx.HTTPError as exc:
        _fail("network", str(exc), EXIT_IO)
    if response.status_code != 200:
        _surface_http_error(response)
    out = Path(output) if output else Path(f"{story_id}{package.FILE_EXTENSION}")
    try:
        out.write_bytes(response.content)
    except OSError as exc:
        _fail("io", f"cannot write {out}: {exc}", EXIT_IO)
    click.echo(out)


@main.command(name="remix")
@click.argument("story_id")
@click.option("--edits", "edits_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--creator", required=True, help="Creator of the remix.")
@click.option("-o", "--output", default=None, help="Output .mar path.")
@server_option
@catalog_option
def remix_cmd(
    story_id: str,
    edits_path: str,
    creator: str,
    output: Optional[str],
    server: Optional[str],
    catalog_dir: Optional[str],
) -> None:
    """Fetch a story, derive a remix draft, apply an edit script, build."""
    try:
        with _client(_server_url(server)) as client:
            response = client.get(f"/stories/{story_id}")
    except httpx.HTTPError as exc:
        _fail("network", str(exc), EXIT_IO)
    if response.status_code != 200:
        _surface_http_error(response)
    parent = _decode_or_fail(response.content)
    cat = _open_catalog(catalog_dir)
    try:
        draft = remix.derive_remix(parent, creator)
        story = script.apply_edit_script(draft, Path(edits_path).read_text("utf-8"), cat)
        data = package.encode(story)
    except script.ScriptError as exc:
        _fail("script", f"{edits_path}:{exc.line or 0}: {exc.message}", EXIT_VALIDATION)
    except (ModelError, StoryValidationError, package.PackageError) as exc:
        _fail("invalid_story", str(exc), EXIT_VALIDATION)
    out = Path(output) if output else Path(f"remix-{story_id[:8]}{package.FILE_EXTENSION}")
    try:
        out.write_bytes(data)
    except OSError as exc:
        _fail("io", f"cannot write {out}: {exc}", EXIT_IO)
    click.echo(out)


@main.command()
@click.argument("story_id")
@server_option
def lineage(story_id: str, server: Optional[str]) -> None:
    """Show the remix chain from the root to a story."""
    try:
        with _client(_server_url(server)) as client:
            response = client.get(f"/stories/{story_id}/lineage")
    except httpx.HTTPError as exc:
        _fail("network", str(exc), EXIT_IO)
    if response.status_code != 200:
        _surface_http_error(response)
    chain = response.json()["lineage"]
    for depth, listing in enumerate(chain):
        indent = "  " * depth
        click.echo(f"{indent}{listing['story_id']}  {listing['creator']}: {listing['title']}")
    click.echo(chain[-1]["story_id"])


@main.command()
@server_option
def stats(server: Optional[str]) -> None:
    """Print the repository usage report as canonical JSON."""
    try:
        with _client(_server_url(server)) as client:
            response = client.get("/stats")
    except httpx.HTTPError as exc:
        _fail("network", str(exc), EXIT_IO)
    if response.status_code != 200:
        _surface_http_error(response)
    click.echo(response.text)


@main.command()
def dialogs() -> None:
    """List the preset dialog lines scripts can reference."""
    for text in script.PRESET_DIALOGS:
        click.echo(text)


if __name__ == "__main__":
    main()
