"""Fingerprinting-script classifier.

Wildcard patterns map recorded API symbols to categories; a script is
flagged as fingerprinting when it touches at least ``category_threshold``
distinct categories of which at least ``explicit_requirement`` are
explicit-fingerprinting categories. Matching is case-sensitive, anchored,
first-match-wins in table order, and linear-time (no regex backtracking).
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class FingerprintPattern:
    pattern: str  # "*" matches any (possibly empty) substring
    category: str
    explicit: bool

    def __post_init__(self) -> None:
        if not self.pattern:
            raise ValueError("empty pattern")


#: Default pattern table. Order matters: the first matching row decides.
DEFAULT_PATTERNS: tuple[FingerprintPattern, ...] = tuple(
    FingerprintPattern(p, c, e)
    for p, c, e in [
        ("window.ethereum", "Wallet", False),
        ("window.cardano", "Wallet", False),
        ("window.solana", "Wallet", False),
        ("window.BinanceChain", "Wallet", False),
        ("RTCPeerConnection*", "RTC", True),
        ("RTCPeerConnectionIceEvent*", "RTC", True),
        ("WebGLRenderingContext*", "WebGL", True),
        ("HTMLCanvasElement*", "Canvas", True),
        ("CanvasRenderingContext2D*", "Canvas", True),
        ("*Storage*", "Storage", False),
        ("*indexedDB*", "Storage", False),
        ("Screen*", "ScreenSize", False),
        ("*screen*", "ScreenSize", False),
        ("*cookie*", "Cookies", False),
        ("Date*", "DateTime", False),
        ("*DateTimeFormat*", "DateTime", False),
        ("*getBattery*", "Battery", True),
        ("*Height*", "WindowSize", False),
        ("*Width*", "WindowSize", False),
        ("BarProp*", "WindowSize", False),
        ("*connection*", "Connection", False),
        ("*onLine*", "Connection", False),
        ("*devicePixelRatio*", "ScreenResolution", False),
        ("*window.name*", "WindowLocation", False),
        ("*plugins*", "Plugins", True),
        ("*mimeType*", "Plugins", True),
        ("*canPlayType*", "Plugins", True),
        ("*vendor*", "Browser", False),
        ("*product*", "Browser", False),
        ("*platform*", "Browser", False),
        ("*app*", "Browser", False),
        ("*userAgent*", "Browser", False),
        ("*language*", "Language", False),
        ("DeviceOrientationEvent*", "Device", True),
        ("DeviceMotionEvent*", "Device", True),
        ("*maxTouchPoints*", "Device", True),
        ("*hardwareConcurrency*", "Device", True),
        ("*deviceMemory*", "Device", True),
        ("*memory*", "Device", True),
        ("AudioBuffer*", "Audio", True),
        ("OfflineAudioContext*", "Audio", True),
        ("*requestMediaKeySystemAccess*", "Media", False),
        ("*mediaDevices*", "Media", False),
        ("*enumerateDevice*", "Media", False),
        ("*mediaCapabilities*", "Media", False),
        ("Navigator*", "Navigator", False),
        ("Performance*", "Performance", False),
        ("speechSynthesis*", "SpeechSynthesis", True),
    ]
)

#: The categories whose presence can satisfy the explicit requirement.
EXPLICIT_CATEGORIES = frozenset(
    {"RTC", "WebGL", "Canvas", "Battery", "Plugins", "Device", "Audio", "SpeechSynthesis"}
)


def glob_match(pattern: str, s: str) -> bool:
    """Anchored wildcard match where '*' spans any (possibly empty)
    substring. Greedy left-to-right segment placement; linear time."""
    parts = pattern.split("*")
    if len(parts) == 1:
        return pattern == s
    first, last = parts[0], parts[-1]
    if not s.startswith(first) or not s.endswith(last):
        return False
    pos = len(first)
    end = len(s) - len(last)
    for seg in parts[1:-1]:
        if not seg:
            continue
        i = s.find(seg, pos, end)
        if i < 0:
            return False
        pos = i + len(seg)
    return pos <= end


@dataclass(frozen=True)
class ClassifierConfig:
    patterns: tuple[FingerprintPattern, ...] = DEFAULT_PATTERNS
    category_threshold: int = 10
    explicit_requirement: int = 1

    def __post_init__(self) -> None:
        if self.category_threshold < 1:
            raise ValueError("category_threshold must be >= 1")
        if self.explicit_requirement < 0:
            raise ValueError("explicit_requirement must be >= 0")
        if not self.patterns:
            raise ValueError("pattern table is empty")

    @property
    def category_universe(self) -> frozenset[str]:
        return frozenset(p.category for p in self.patterns)

    @property
    def category_universe_size(self) -> int:
        return len(self.category_universe)

    @property
    def explicit_categories(self) -> frozenset[str]:
        return frozenset(p.category for p in self.patterns if p.explicit)

    @property
    def explicit_category_count(self) -> int:
        return len(self.explicit_categories)


def default_classifier_config() -> ClassifierConfig:
    cfg = ClassifierConfig()
    assert cfg.category_universe_size == 22
    assert cfg.explicit_categories == EXPLICIT_CATEGORIES
    return cfg


def load_patterns(path) -> tuple[FingerprintPattern, ...]:
    """Pattern override file: one row per line, tab-separated:
    ``<pattern>\\t<category>\\t<explicit:0|1>``. Blank lines and lines
    starting with '#' are skipped."""
    rows: list[FingerprintPattern] = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3 or parts[2] not in ("0", "1"):
                raise ValueError(f"patterns file line {line_no}: expected <pattern>\\t<category>\\t<0|1>")
            rows.append(FingerprintPattern(parts[0], parts[1], parts[2] == "1"))
    if not rows:
        raise ValueError("patterns file contains no rows")
    return tuple(rows)


@dataclass(frozen=True)
class FingerprintVerdict:
    script_url: str
    categories_hit: frozenset[str]
    explicit_hit: frozenset[str]
    flagged: bool


def categorize_call(symbol: str, config: ClassifierConfig) -> tuple[str, bool] | None:
    """First matching pattern's (category, explicit) in table order."""
    for p in config.patterns:
        if glob_match(p.pattern, symbol):
            return (p.category, p.explicit)
    return None


def classify_script(script_url: str, symbols, config: ClassifierConfig) -> FingerprintVerdict:
    categories: set[str] = set()
    explicit: set[str] = set()
    for sym in symbols:
        hit = categorize_call(sym, config)
        if hit is None:
            continue
        cat, is_explicit = hit
        categories.add(cat)
        if is_explicit:
            explicit.add(cat)
    flagged = len(categories) >= config.category_threshold and len(explicit) >= config.explicit_requirement
    return FingerprintVerdict(script_url, frozenset(categories), frozenset(explicit), flagged)


@dataclass(frozen=True)
class FingerprintStats:
    flagged_count: int
    mean_categories: float
    max_categories: int
    flagged_scripts: tuple[str, ...] = ()


def corpus_fingerprint_stats(verdicts) -> FingerprintStats:
    """Aggregate over flagged verdicts only; zeroed when none are flagged."""
    flagged = [v for v in verdicts if v.flagged]
    if not flagged:
        return FingerprintStats(0, 0.0, 0)
    sizes = [len(v.categories_hit) for v in flagged]
    return FingerprintStats(
        flagged_count=len(flagged),
        mean_categories=sum(sizes) / len(sizes),
        max_categories=max(sizes),
        flagged_scripts=tuple(sorted(v.script_url for v in flagged)),
    )
