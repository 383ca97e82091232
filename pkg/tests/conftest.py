from __future__ import annotations

import random
import threading
import time

import pytest
import uvicorn

from microar.geometry import quat_normalize
from microar.model import (
    AssetRef,
    DialogBalloon,
    Metadata,
    PlacedObject,
    PlacementHints,
    Scene,
    Story,
    SurfaceClass,
    Transform,
    random_id,
)
from microar.server.app import create_app

_WORDS = ("bees", "piano", "garden", "space", "café", "Übung", "夜空", "penguin", "tiny", "storm")
_DIALOGS = ("Hello!", "VROOM", "Zzzz", "¿quién va primero?", "look → up", "Raawr")


def random_transform(rng: random.Random) -> Transform:
    rotation = quat_normalize(tuple(rng.uniform(-1, 1) for _ in range(4)))
    return Transform(
        position=(rng.uniform(-3, 3), rng.uniform(0, 1), rng.uniform(-3, 3)),
        rotation=rotation,
        scale=rng.uniform(0.05, 20.0),
    )


def random_object(rng: random.Random) -> PlacedObject:
    dialog = None
    if rng.random() < 0.4:
        dialog = DialogBalloon(rng.choice(_DIALOGS), (rng.uniform(-0.5, 0.5), rng.uniform(0, 1), 0.0))
    group = random_id(rng) if rng.random() < 0.2 else None
    return PlacedObject(
        object_id=random_id(rng),
        asset=AssetRef(f"{rng.getrandbits(128):032x}", rng.choice(_WORDS)),
        transform=random_transform(rng),
        group_id=group,
        dialog=dialog,
    )


def random_story(rng: random.Random, publishable: bool = True) -> Story:
    hints = None
    if rng.random() < 0.3:
        hints = PlacementHints(
            surface_class=rng.choice(list(SurfaceClass)),
            min_extents=(rng.uniform(0.1, 3), rng.uniform(0.1, 3)) if rng.random() < 0.5 else None,
            note=rng.choice(_WORDS) if rng.random() < 0.5 else "",
        )
    scene_count = rng.randint(1, 4)
    scenes = []
    total_objects = 0
    for i in range(scene_count):
        objects = tuple(random_object(rng) for _ in range(rng.randint(0, 4)))
        total_objects += len(objects)
        scenes.append(Scene(scene_id=random_id(rng), index=i, objects=objects))
    if publishable and total_objects == 0:
        scenes[0] = Scene(
            scene_id=scenes[0].scene_id, index=0, objects=(random_object(rng),)
        )
    title = " ".join(rng.choice(_WORDS) for _ in range(2))
    metadata = Metadata(
        creator=f"author-{rng.randint(1, 18):02d}",
        title=title if publishable or rng.random() < 0.8 else "",
        description=f"a story about {title}" if publishable or rng.random() < 0.8 else "",
        created_at=rng.randint(0, 2_000_000_000),
        placement_hints=hints,
    )
    return Story(metadata=metadata, scenes=tuple(scenes))


class LiveServer:
    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        config = uvicorn.Config(
            create_app(data_dir=data_dir), host="127.0.0.1", port=0, log_level="warning"
        )
        self._server = uvicorn.Server(config)
        self._thread = threading.Thread(target=self._server.run, daemon=True)

    def start(self) -> "LiveServer":
        self._thread.start()
        deadline = time.monotonic() + 10
        while not self._server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("server did not start in time")
            time.sleep(0.01)
        port = self._server.servers[0].sockets[0].getsockname()[1]
        self.url = f"http://127.0.0.1:{port}"
        return self

    def stop(self) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=10)


@pytest.fixture
def live_server(tmp_path):
    server = LiveServer(str(tmp_path / "data")).start()
    yield server
    server.stop()
