"""Cross-module integration: live service round trip, app channel, CLI determinism."""
import json
import socket
import threading
import time

import pytest
import uvicorn

from adfkit.cli import main
from adfkit.fingerprint import DeviceConfig, build_fingerprint_dataset, filter_raw
from adfkit.classifier import Hyperparams, train
from adfkit.classifier.training import assign_measured_uniqueness
from adfkit.metrics import vulnerability, vulnerability_by_config
from adfkit.registry import builtin_registry
from adfkit.service import ServiceConfig, create_app
from adfkit.synth import AttributeDistSpec, ImpressionsSpec, PopulationSpec, generate

from conftest import APP_CFG


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture()
def live_server(tmp_path):
    port = free_port()
    cfg = ServiceConfig(listen=f"127.0.0.1:{port}", storage_dir=str(tmp_path / "store"))
    app = create_app(cfg)
    server = uvicorn.Server(
        uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    import httpx

    while time.time() < deadline:
        try:
            if httpx.get(f"http://127.0.0.1:{port}/v1/healthz", timeout=1.0).status_code == 200:
                break
        except httpx.HTTPError:
            time.sleep(0.05)
    else:
        pytest.fail("service did not come up")
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def test_post_command_against_live_server(live_server, tmp_path, capsys):
    raw = tmp_path / "raw.jsonl"
    assert main(["synth", "--out", str(raw), "--n-samples", "200", "--seed", "3",
                 "--out-dir", str(tmp_path)]) == 0
    rc = main(["post", "--endpoint", live_server, "--samples", str(raw),
               "--out-dir", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out.strip().splitlines()[-1]
    results = json.loads(out)
    assert results.get("stored") == 200

    import httpx

    stats = httpx.get(f"{live_server}/v1/stats").json()
    assert stats["stored"] == 200
    assert stats["received"] == 200
    export = httpx.get(f"{live_server}/v1/export").content
    assert len(export.splitlines()) == 200


def test_app_channel_end_to_end():
    """The 35-attribute basis: generate app traffic, train, report."""
    reg = builtin_registry()
    ios = DeviceConfig("mobile", "iOS", "webview", "app")
    spec = PopulationSpec(
        n_devices=1200,
        config_shares=[(APP_CFG, 0.7), (ios, 0.3)],
        impressions=ImpressionsSpec(kind="geometric", mean=3.0),
        ad_id_report_rate=0.9,
        loss_rate=0.0,
        seed=77,
    )
    from adfkit.registry import scoped_meta_attributes

    metas = scoped_meta_attributes(reg, "app")
    assert len(metas) == 20
    dists = []
    for meta in metas:
        if meta in ("Canvas", "Storage: quota"):
            dists.append(AttributeDistSpec(meta, support_size=90, target_h=0.7))
        else:
            dists.append(AttributeDistSpec(meta, support_size=3, target_h=0.08))
    samples = generate(spec, dists, reg)
    assert all(len(s.attributes) == 35 for s in samples)
    groups = build_fingerprint_dataset(filter_raw(samples), reg)
    clf = train(groups, reg, "app", Hyperparams(n_rounds=25, max_depth=3), k_folds=3, seed=1)
    assert clf.channel == "app"
    assign_measured_uniqueness(groups, clf)
    reports = vulnerability_by_config(groups)
    assert len(reports) == 2
    for rep in reports.values():
        assert rep.accuracy >= 0.7


def test_sample_weighted_vulnerability():
    from test_metrics import grp

    groups = [grp("d1", 1, 1, n=10), grp("d2", 0, 0, n=2)]
    by_group = vulnerability(groups)
    by_sample = vulnerability(groups, weight_by_samples=True)
    assert by_group.tv == 0.5
    assert by_sample.tv == 10 / 12
    assert by_sample.n_fingerprints == by_group.n_fingerprints == 2


def test_cli_synth_reproducible(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for out in (a, b):
        assert main(["synth", "--out", str(out), "--n-samples", "800", "--seed", "12",
                     "--out-dir", str(tmp_path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    for sub in ("synth", "serve", "post", "filter", "fingerprint", "stats",
                "train", "report", "select", "simulate", "plot"):
        assert sub in out


def test_plot_comparison(tmp_path):
    comparison = tmp_path / "cmp.csv"
    comparison.write_text(
        "policy,device_type,os,agent,channel,TV,MV,A,dTV_pct,dMV_pct,dA_pct\n"
        "identity,desktop,Windows,Chrome,web,0.8,0.78,0.9,0.00,0.00,0.00\n"
        "blocker,desktop,Windows,Chrome,web,0.4,0.35,0.85,-50.00,-55.13,-5.56\n"
    )
    out = tmp_path / "cmp.png"
    assert main(["plot", "--comparison", str(comparison), "--out", str(out),
                 "--out-dir", str(tmp_path)]) == 0
    assert out.stat().st_size > 0
