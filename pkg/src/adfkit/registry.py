"""Canonical attribute registry.

The registry is the ordered catalog of every attribute the collector probes,
which of them are retained for fingerprinting, on which channel (browser vs
mobile-app webview) they are available, and how individual attributes fold
into the meta-attributes used for reporting and blocking.

The built-in ``adf-v1`` registry carries 66 collected attributes (35 of them
also available inside app webviews) plus the probed-but-discarded attributes
with their exclusion reasons, so filtering rules stay testable data.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import RegistryError

BUILTIN_TAG = "adf-v1"

SOURCES = frozenset(
    {"js-object", "js-method", "js-api", "ajax-api", "ajax-method", "http-header"}
)
SCOPES = frozenset({"browser-only", "app-and-browser"})
CHANNELS = frozenset({"web", "app"})

EXCLUSION_REASONS = frozenset(
    {
        "constant-value",
        "unstable-over-time",
        "unreliable",
        "unsupported",
        "correlated-value",
        "subsumed",
    }
)


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    source: str
    scope: str  # "browser-only" | "app-and-browser"
    meta_group: str
    collected: bool
    exclusion_reason: str | None = None

    def validate(self) -> None:
        if self.source not in SOURCES:
            raise RegistryError(f"unknown source {self.source!r} for {self.name!r}")
        if self.scope not in SCOPES:
            raise RegistryError(f"unknown scope {self.scope!r} for {self.name!r}")
        if self.collected and self.exclusion_reason is not None:
            raise RegistryError(f"collected attribute {self.name!r} carries an exclusion reason")
        if not self.collected and self.exclusion_reason not in EXCLUSION_REASONS:
            raise RegistryError(
                f"non-collected attribute {self.name!r} needs a valid exclusion reason, "
                f"got {self.exclusion_reason!r}"
            )


@dataclass
class AttributeRegistry:
    """Ordered attribute catalog; immutable after construction."""

    version: str
    specs: list[AttributeSpec]
    meta_groups: dict[str, list[str]] = field(init=False)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for spec in self.specs:
            spec.validate()
            if spec.name in seen:
                raise RegistryError(f"duplicate attribute name {spec.name!r}")
            seen.add(spec.name)
        # Meta-attribute membership is derived from collected specs only, in
        # registry order, so serialization and reporting order are fixed.
        groups: dict[str, list[str]] = {}
        for spec in self.specs:
            if spec.collected:
                groups.setdefault(spec.meta_group, []).append(spec.name)
        self.meta_groups = groups
        # Scoped-name lookups sit on the serialization hot path; precompute.
        self._scoped: dict[str, tuple[str, ...]] = {}
        self._scoped_set: dict[str, frozenset[str]] = {}
        for channel in CHANNELS:
            names = tuple(
                s.name
                for s in self.specs
                if s.collected and (channel == "web" or s.scope == "app-and-browser")
            )
            self._scoped[channel] = names
            self._scoped_set[channel] = frozenset(names)

    def scoped_names(self, channel: str) -> tuple[str, ...]:
        try:
            return self._scoped[channel]
        except KeyError:
            raise RegistryError(f"unknown channel {channel!r}") from None

    def scoped_name_set(self, channel: str) -> frozenset[str]:
        try:
            return self._scoped_set[channel]
        except KeyError:
            raise RegistryError(f"unknown channel {channel!r}") from None

    def collected_specs(self) -> list[AttributeSpec]:
        return [s for s in self.specs if s.collected]

    def spec_for(self, name: str) -> AttributeSpec:
        for spec in self.specs:
            if spec.name == name:
                return spec
        raise RegistryError(f"unknown attribute {name!r}")

    def meta_members(self, meta: str) -> list[str]:
        try:
            return list(self.meta_groups[meta])
        except KeyError:
            raise RegistryError(f"unknown meta-attribute {meta!r}") from None

    def to_json(self) -> str:
        rows = [
            {
                "name": s.name,
                "source": s.source,
                "scope": s.scope,
                "meta_group": s.meta_group,
                "collected": s.collected,
                "exclusion_reason": s.exclusion_reason,
            }
            for s in self.specs
        ]
        return json.dumps({"version": self.version, "attributes": rows}, indent=2)


def scoped_attributes(reg: AttributeRegistry, channel: str) -> list[str]:
    """Collected attribute names available on ``channel``, in registry order."""
    return list(reg.scoped_names(channel))


def scoped_meta_attributes(reg: AttributeRegistry, channel: str) -> list[str]:
    """Meta-attributes whose members report on ``channel``, in registry order."""
    names = set(scoped_attributes(reg, channel))
    out = []
    for meta, members in reg.meta_groups.items():
        if any(m in names for m in members):
            out.append(meta)
    return out


def load_registry(path_or_tag: str | Path) -> AttributeRegistry:
    """Load a registry from a JSON file, or return a built-in one by tag."""
    if isinstance(path_or_tag, str) and path_or_tag == BUILTIN_TAG:
        return builtin_registry()
    path = Path(path_or_tag)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise RegistryError(f"cannot read registry file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise RegistryError(f"malformed registry file {path}: {exc}") from exc
    if not isinstance(raw, dict) or "attributes" not in raw:
        raise RegistryError("registry file must be an object with an 'attributes' array")
    specs = []
    for row in raw["attributes"]:
        try:
            specs.append(
                AttributeSpec(
                    name=row["name"],
                    source=row["source"],
                    scope=row["scope"],
                    meta_group=row["meta_group"],
                    collected=bool(row["collected"]),
                    exclusion_reason=row.get("exclusion_reason"),
                )
            )
        except (KeyError, TypeError) as exc:
            raise RegistryError(f"malformed attribute row {row!r}") from exc
    return AttributeRegistry(version=str(raw.get("version", "unversioned")), specs=specs)


# --------------------------------------------------------------------------
# Built-in adf-v1 catalog.
#
# Row format: (name, source, app_scoped, collected, exclusion_reason, meta_group).
# Order is the canonical registry order and is load-bearing: canonical
# serialization walks attributes in this order.
# --------------------------------------------------------------------------

_W = False  # browser-only
_A = True  # app-and-browser

_ADF_V1_ROWS: list[tuple[str, str, bool, bool, str | None, str]] = [
    ("ua", "js-object", _A, True, None, "UserAgent"),
    ("timeZoneOffset", "js-method", _A, True, None, "Time zone offset"),
    ("menubar", "js-object", _W, False, "constant-value", "Bars settings"),
    ("personalbar", "js-object", _W, False, "constant-value", "Bars settings"),
    ("statusbar", "js-object", _W, False, "constant-value", "Bars settings"),
    ("toolbar", "js-object", _W, False, "constant-value", "Bars settings"),
    ("locationbar", "js-object", _W, False, "constant-value", "Bars settings"),
    ("scrollbars", "js-object", _W, False, "constant-value", "Bars settings"),
    ("downlink", "js-api", _W, False, "unstable-over-time", "Network Info"),
    ("effectiveType", "js-api", _W, False, "unstable-over-time", "Network Info"),
    ("rtt", "js-api", _W, False, "unstable-over-time", "Network Info"),
    ("saveData", "js-api", _W, False, "unstable-over-time", "Network Info"),
    ("type", "js-api", _W, False, "unstable-over-time", "Network Info"),
    ("hw Concurrency", "js-object", _A, True, None, "CPU cores"),
    ("device Memory", "js-object", _A, True, None, "Device memory"),
    ("width", "js-object", _W, False, "correlated-value", "Screen settings"),
    ("height", "js-object", _W, False, "correlated-value", "Screen settings"),
    ("colorDepth", "js-object", _W, True, None, "Screen: color depth"),
    ("pixelDepth", "js-object", _W, False, "correlated-value", "Screen settings"),
    ("orientation.angle", "js-object", _A, True, None, "Screen: orientation angle"),
    ("orientation.type", "js-object", _W, True, None, "Screen: orientation type"),
    ("screenLeft", "js-object", _W, True, None, "Screen: pixel left"),
    ("screenTop", "js-object", _W, False, "correlated-value", "Screen settings"),
    ("multitouch", "js-object", _W, False, "subsumed", "Simultaneous touch points"),
    ("maxTouchPoints", "js-object", _A, True, None, "Simultaneous touch points"),
    ("content-encoding", "http-header", _W, False, "unstable-over-time", "Content encoding"),
    ("content-type", "http-header", _W, False, "unstable-over-time", "Content type"),
    ("referer", "js-object", _W, False, "unstable-over-time", "Referer"),
    ("url", "js-object", _W, False, "unstable-over-time", "URL"),
    ("platform", "js-object", _W, False, "subsumed", "Platform"),
    ("languages", "js-object", _A, True, None, "Languages"),
    ("doNotTrack", "js-object", _W, False, "subsumed", "Do Not Track"),
    ("javaEnabled", "js-object", _W, False, "constant-value", "Java enabled"),
    ("webDriver", "js-object", _W, False, "constant-value", "Web Driver"),
    ("pdfViewerEnabled", "js-object", _W, True, None, "PDF viewer enabled"),
    ("availWidth", "js-object", _A, True, None, "available width"),
    ("availHeight", "js-object", _A, True, None, "available height"),
    ("availLeft", "js-object", _W, True, None, "available left"),
    ("availTop", "js-object", _W, True, None, "available top"),
    ("fullScreenEnabled", "js-object", _A, True, None, "full screen enabled"),
    ("usage", "ajax-api", _W, False, "unstable-over-time", "Storage"),
    ("quota", "ajax-api", _A, True, None, "Storage: quota"),
    ("window.navigator", "js-object", _A, True, None, "navigator properties"),
    ("plugins", "js-object", _W, True, None, "Plugins"),
    ("cookieEnabled", "js-object", _W, True, None, "Cookie enabled"),
    ("cookies", "js-object", _W, False, "unstable-over-time", "Cookies"),
    ("mimeType", "js-object", _W, True, None, "MIME type"),
    ("accelerometer", "ajax-method", _W, True, None, "User Permissions state"),
    ("ambient-light-sensor", "ajax-method", _W, False, "constant-value", "User Permissions state"),
    ("background-fetch", "ajax-method", _W, True, None, "User Permissions state"),
    ("background-sync", "ajax-method", _W, True, None, "User Permissions state"),
    ("camera", "ajax-method", _W, True, None, "User Permissions state"),
    ("clipboard-read", "ajax-method", _W, True, None, "User Permissions state"),
    ("clipboard-write", "ajax-method", _W, True, None, "User Permissions state"),
    ("display-capture", "ajax-method", _W, True, None, "User Permissions state"),
    ("geolocation", "ajax-method", _W, True, None, "User Permissions state"),
    ("gyroscope", "ajax-method", _W, True, None, "User Permissions state"),
    ("magnetometer", "ajax-method", _W, True, None, "User Permissions state"),
    ("microphone", "ajax-method", _W, True, None, "User Permissions state"),
    ("midi", "ajax-method", _W, True, None, "User Permissions state"),
    ("nfc", "ajax-method", _W, True, None, "User Permissions state"),
    ("notifications", "ajax-method", _W, True, None, "User Permissions state"),
    ("payment-handler", "ajax-method", _W, True, None, "User Permissions state"),
    ("persistent-storage", "ajax-method", _W, True, None, "User Permissions state"),
    ("push", "ajax-method", _W, False, "constant-value", "User Permissions state"),
    ("screen-wake-lock", "ajax-method", _W, True, None, "User Permissions state"),
    ("mediaDevices", "ajax-method", _A, True, None, "Media devices"),
    ("canvas", "js-api", _A, True, None, "Canvas"),
    ("fonts", "js-method", _A, True, None, "Fonts"),
    ("bluetoothAvailability", "ajax-api", _W, True, None, "Bluetooth availability"),
    ("charging", "ajax-api", _W, True, None, "Battery status: charging"),
    ("level", "ajax-api", _W, False, "unstable-over-time", "Battery status"),
    ("chargingTime", "ajax-api", _W, False, "unstable-over-time", "Battery status"),
    ("dischargingTime", "ajax-api", _W, False, "unstable-over-time", "Battery status"),
    ("baseLatency", "js-api", _A, True, None, "Audio cxt: base latency"),
    ("maxChannelCount", "js-api", _W, True, None, "Audio cxt: max channel count"),
    ("sampleRate", "js-api", _A, True, None, "Audio cxt: sample rate"),
    ("state", "js-api", _W, True, None, "Audio cxt: state"),
    ("channelCount", "js-api", _W, False, "constant-value", "Frequency analyser"),
    ("webglVendor", "js-api", _W, False, "subsumed", "WebGL Vendor"),
    ("webglRenderer", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("webglExtensions", "js-api", _A, True, None, "WebGL Extensions"),
    ("antialias", "js-api", _W, False, "constant-value", "WebGL Attributes"),
    ("powerPreference", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("desynchronized", "js-api", _W, False, "constant-value", "WebGL Attributes"),
    ("ALIASED_LINE_WIDTH_RANGE", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("ALIASED_POINT_SIZE_RANGE", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("IMPLEMENTATION_COLOR_READ_FORMAT", "js-api", _W, False, "constant-value", "WebGL Parameters"),
    ("IMPLEMENTATION_COLOR_READ_TYPE", "js-api", _W, False, "constant-value", "WebGL Parameters"),
    ("MAX_COMBINED_TEXTURE_IMAGE_UNITS", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("MAX_CUBE_MAP_TEXTURE_SIZE", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("MAX_FRAGMENT_UNIFORM_VECTORS", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("MAX_RENDERBUFFER_SIZE", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("MAX_TEXTURE_IMAGE_UNITS", "js-api", _W, False, "constant-value", "WebGL Parameters"),
    ("MAX_TEXTURE_SIZE", "js-api", _W, False, "correlated-value", "WebGL Parameters"),
    ("MAX_VARYING_VECTORS", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("MAX_VERTEX_ATTRIBS", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("MAX_VERTEX_TEXTURE_IMAGE_UNITS", "js-api", _W, False, "constant-value", "WebGL Parameters"),
    ("MAX_VERTEX_UNIFORM_VECTORS", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("MAX_VIEWPORT_DIMS", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("RENDERER", "js-api", _W, False, "subsumed", "WebGL Parameters"),
    ("SAMPLES", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("SAMPLE_BUFFERS", "js-api", _W, False, "constant-value", "WebGL Parameters"),
    ("SHADING_LANGUAGE_VERSION", "js-api", _W, False, "subsumed", "WebGL Parameters"),
    ("STENCIL_FUNC", "js-api", _W, False, "constant-value", "WebGL Parameters"),
    ("STENCIL_VALUE_MASK", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("SUBPIXEL_BITS", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("VENDOR", "js-api", _W, False, "subsumed", "WebGL Parameters"),
    ("VERSION", "js-api", _W, False, "subsumed", "WebGL Parameters"),
    ("FR_S_LOW_FLOAT", "js-api", _W, False, "correlated-value", "WebGL ShaderPrecision"),
    ("FR_S_MEDIUM_FLOAT", "js-api", _W, False, "correlated-value", "WebGL ShaderPrecision"),
    ("FR_S_HIGH_FLOAT", "js-api", _W, False, "constant-value", "WebGL ShaderPrecision"),
    ("FR_S_LOW_INT", "js-api", _W, False, "correlated-value", "WebGL ShaderPrecision"),
    ("FR_S_MEDIUM_INT", "js-api", _W, False, "correlated-value", "WebGL ShaderPrecision"),
    ("FR_S_HIGH_INT [.rangeMax]", "js-api", _A, True, None, "WebGL (Rend - Param)"),
    ("VR_S_LOW_FLOAT", "js-api", _W, False, "correlated-value", "WebGL ShaderPrecision"),
    ("VR_S_MEDIUM_FLOAT", "js-api", _W, False, "correlated-value", "WebGL ShaderPrecision"),
    ("VR_S_LOW_INT", "js-api", _W, False, "correlated-value", "WebGL ShaderPrecision"),
    ("VR_S_MEDIUM_INT", "js-api", _W, False, "correlated-value", "WebGL ShaderPrecision"),
    ("VR_S_HIGH_INT", "js-api", _W, False, "correlated-value", "WebGL ShaderPrecision"),
    ("acc [.supported]", "ajax-api", _A, True, None, "Audio formats: ACC"),
    ("x-wav", "ajax-api", _W, False, "correlated-value", "Audio formats"),
    ("mpeg", "ajax-api", _W, False, "correlated-value", "Audio formats"),
    ("aacp [.supported]", "ajax-api", _W, True, None, "Audio formats: AACP"),
    ("wav", "ajax-api", _W, False, "correlated-value", "Audio formats"),
    ("mp4-codec_mp4a402", "ajax-api", _W, False, "constant-value", "Audio formats"),
    ("mp4-codec_ac-3", "ajax-api", _W, False, "correlated-value", "Audio formats"),
    ("mp4-codec_ec-3", "ajax-api", _W, False, "correlated-value", "Audio formats"),
    ("mp4-codec_alac", "ajax-api", _W, False, "constant-value", "Audio formats"),
    ("flac", "ajax-api", _W, False, "correlated-value", "Audio formats"),
    ("mp4-codec_flac", "ajax-api", _W, False, "correlated-value", "Audio formats"),
    ("ogg-codec_flac", "ajax-api", _W, False, "correlated-value", "Audio formats"),
    ("mp4-codec_mp3", "ajax-api", _W, False, "correlated-value", "Audio formats"),
    ("ogg-codec_opus", "ajax-api", _W, False, "correlated-value", "Audio formats"),
    ("webm-codec_opus", "ajax-api", _W, False, "correlated-value", "Audio formats"),
    ("mp4-codec_opus", "ajax-api", _W, False, "correlated-value", "Audio formats"),
    ("ogg-codec_vorbis", "ajax-api", _W, False, "correlated-value", "Audio formats"),
    ("webm-codec_vorbis", "ajax-api", _W, False, "correlated-value", "Audio formats"),
]

N_COLLECTED_WEB = 66
N_COLLECTED_APP = 35


def builtin_registry() -> AttributeRegistry:
    specs = [
        AttributeSpec(
            name=name,
            source=source,
            scope="app-and-browser" if app_scoped else "browser-only",
            meta_group=meta,
            collected=collected,
            exclusion_reason=reason,
        )
        for name, source, app_scoped, collected, reason, meta in _ADF_V1_ROWS
    ]
    reg = AttributeRegistry(version=BUILTIN_TAG, specs=specs)
    n_web = len(scoped_attributes(reg, "web"))
    n_app = len(scoped_attributes(reg, "app"))
    if n_web != N_COLLECTED_WEB or n_app != N_COLLECTED_APP:
        raise RegistryError(
            f"builtin registry corrupted: {n_web} web / {n_app} app collected attributes"
        )
    return reg
