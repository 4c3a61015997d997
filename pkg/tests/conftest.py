import pytest

from adfkit.fingerprint import DeviceConfig, Sample
from adfkit.registry import AttributeRegistry, AttributeSpec, builtin_registry


@pytest.fixture(scope="session")
def reg():
    return builtin_registry()


def toy_registry(names=("a", "b"), app_names=(), metas=None):
    """Small registry for serialization tests; meta defaults to the name."""
    specs = []
    for name in names:
        specs.append(
            AttributeSpec(
                name=name,
                source="js-object",
                scope="app-and-browser" if name in app_names else "browser-only",
                meta_group=(metas or {}).get(name, name),
                collected=True,
            )
        )
    return AttributeRegistry(version="toy", specs=specs)


WEB_CFG = DeviceConfig("desktop", "Windows", "Chrome", "web")
APP_CFG = DeviceConfig("mobile", "Android", "webview", "app")


def mk_sample(sid, attrs, ad_id="ad-1", config=WEB_CFG, dnt=False, complete=True, ts=0):
    return Sample(
        sample_id=sid,
        ts=ts,
        ad_id=ad_id,
        config=config,
        attributes=dict(attrs),
        dnt=dnt,
        complete=complete,
    )
