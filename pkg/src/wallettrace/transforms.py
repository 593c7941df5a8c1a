"""Transform registry for the leak search: reversible encodings, one-way
digests, and canonical secret variants, plus the decode attempts used by
the payload scanner.

Chains are written outermost-first: ``["base64_std_padded",
"percent_encoding"]`` denotes base64(percent(x)).
"""

from __future__ import annotations

import base64
import binascii
import hashlib
import urllib.parse
from dataclasses import dataclass

from . import lzstr

ENCODINGS = ("base64_std_padded", "base64_urlsafe_unpadded", "percent_encoding", "lzstring_base64")
DIGESTS = ("md5_hex", "sha1_hex", "sha256_hex", "murmur3_32_hex")
VARIANTS = ("as_given", "lowercase", "uppercase", "strip_0x_lowercase")


def murmur3_32(data: bytes, seed: int = 0) -> int:
    """MurmurHash3 x86 32-bit."""
    c1 = 0xCC9E2D51
    c2 = 0x1B873593
    h = seed & 0xFFFFFFFF
    n = len(data) & ~3
    for i in range(0, n, 4):
        k = int.from_bytes(data[i : i + 4], "little")
        k = (k * c1) & 0xFFFFFFFF
        k = ((k << 15) | (k >> 17)) & 0xFFFFFFFF
        k = (k * c2) & 0xFFFFFFFF
        h ^= k
        h = ((h << 13) | (h >> 19)) & 0xFFFFFFFF
        h = (h * 5 + 0xE6546B64) & 0xFFFFFFFF
    k = 0
    tail = data[n:]
    if len(tail) >= 3:
        k ^= tail[2] << 16
    if len(tail) >= 2:
        k ^= tail[1] << 8
    if len(tail) >= 1:
        k ^= tail[0]
        k = (k * c1) & 0xFFFFFFFF
        k = ((k << 15) | (k >> 17)) & 0xFFFFFFFF
        k = (k * c2) & 0xFFFFFFFF
        h ^= k
    h ^= len(data)
    h ^= h >> 16
    h = (h * 0x85EBCA6B) & 0xFFFFFFFF
    h ^= h >> 13
    h = (h * 0xC2B2AE35) & 0xFFFFFFFF
    h ^= h >> 16
    return h


_APPLY = {
    "base64_std_padded": lambda s: base64.b64encode(s.encode("utf-8")).decode("ascii"),
    "base64_urlsafe_unpadded": lambda s: base64.urlsafe_b64encode(s.encode("utf-8")).decode("ascii").rstrip("="),
    # RFC 3986 unreserved set only: letters, digits, "_.-~" stay literal.
    "percent_encoding": lambda s: urllib.parse.quote(s, safe=""),
    "lzstring_base64": lzstr.compress_to_base64,
    "md5_hex": lambda s: hashlib.md5(s.encode("utf-8")).hexdigest(),
    "sha1_hex": lambda s: hashlib.sha1(s.encode("utf-8")).hexdigest(),
    "sha256_hex": lambda s: hashlib.sha256(s.encode("utf-8")).hexdigest(),
    "murmur3_32_hex": lambda s: format(murmur3_32(s.encode("utf-8")), "08x"),
}


@dataclass(frozen=True)
class TransformSet:
    """The transform roster and chain-depth budget for the leak search.

    At most one digest may appear in a chain (a digest destroys the
    preimage, so stacking digests only burns depth); encodings may both
    precede and follow it.
    """

    encodings: tuple[str, ...] = ENCODINGS
    digests: tuple[str, ...] = DIGESTS
    variants: tuple[str, ...] = VARIANTS
    max_depth: int = 3

    def __post_init__(self) -> None:
        for name in (*self.encodings, *self.digests):
            if name not in _APPLY:
                raise ValueError(f"unknown transform: {name}")
        for name in self.variants:
            if name not in VARIANTS:
                raise ValueError(f"unknown variant: {name}")
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")

    @property
    def chain_alphabet(self) -> tuple[str, ...]:
        return self.encodings + self.digests

    def iter_chains(self):
        """All chains of length 0..max_depth honoring the one-digest rule,
        shortest first, then in alphabet order (encodings before digests).

        The enumeration order doubles as the tie-break for candidate-string
        collisions: the first chain producing a given string wins.
        """
        digests = set(self.digests)
        frontier: list[tuple[str, ...]] = [()]
        yield ()
        for _ in range(self.max_depth):
            nxt = []
            for chain in frontier:
                used_digest = any(t in digests for t in chain)
                for name in self.chain_alphabet:
                    if used_digest and name in digests:
                        continue
                    ext = chain + (name,)
                    nxt.append(ext)
                    yield ext
            frontier = nxt


def apply_transform(name: str, value: str) -> str:
    return _APPLY[name](value)


def apply_chain(chain: tuple[str, ...] | list[str], value: str) -> str:
    """Apply a chain written outermost-first: last name is applied first."""
    for name in reversed(chain):
        value = _APPLY[name](value)
    return value


def canonical_variants(value: str, variants: tuple[str, ...] = VARIANTS) -> list[tuple[str, str]]:
    """(variant_name, text) pairs, deduplicated by text keeping the first
    name. strip_0x_lowercase is only produced for 0x-prefixed values."""
    produced: list[tuple[str, str]] = []
    seen: set[str] = set()
    for name in variants:
        if name == "as_given":
            v = value
        elif name == "lowercase":
            v = value.lower()
        elif name == "uppercase":
            v = value.upper()
        elif name == "strip_0x_lowercase":
            if not value[:2] in ("0x", "0X"):
                continue
            v = value[2:].lower()
        else:
            raise ValueError(f"unknown variant: {name}")
        if v not in seen:
            seen.add(v)
            produced.append((name, v))
    return produced


# ---------------------------------------------------------------------------
# Decode attempts (stage-3 of the payload scan). Each takes token bytes and
# returns decoded bytes or None. Tokens arrive with any trailing "=" already
# stripped by the tokenizer ("=" is a separator), so base64 decoders re-pad.
# ---------------------------------------------------------------------------

# Deleting the allowed alphabet from a token leaves b"" iff every byte of
# the token is in the alphabet.
_B64_STD_CHARS = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/"
_B64_URL_CHARS = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_"
_LZ_FIRST = b"ABCDEFGHIJKLMNOP"


def decode_base64_std(tok: bytes) -> bytes | None:
    if not tok or len(tok) % 4 == 1 or tok.translate(None, _B64_STD_CHARS) != b"":
        return None
    try:
        return base64.b64decode(tok + b"=" * (-len(tok) % 4), validate=True)
    except (binascii.Error, ValueError):
        return None


def decode_base64_urlsafe(tok: bytes) -> bytes | None:
    if not tok or len(tok) % 4 == 1 or tok.translate(None, _B64_URL_CHARS) != b"":
        return None
    try:
        return base64.urlsafe_b64decode(tok + b"=" * (-len(tok) % 4))
    except (binascii.Error, ValueError):
        return None


def decode_percent(tok: bytes) -> bytes | None:
    if b"%" not in tok:
        return None
    out = urllib.parse.unquote_to_bytes(tok)
    if out == tok:
        return None
    return out


def decode_lzstring(tok: bytes) -> bytes | None:
    # First-symbol gate: compressing any string whose first code unit is
    # < 256 emits an initial 6-bit symbol in [0, 15] ("A".."P"). All chain
    # values here derive from ASCII secrets, so other starts can't be ours.
    if len(tok) < 2 or tok[:1] not in _LZ_FIRST or tok.translate(None, _B64_STD_CHARS) != b"":
        return None
    try:
        text = tok.decode("ascii")
    except UnicodeDecodeError:
        return None
    out = lzstr.decompress_from_base64(text)
    if out is None or out == "":
        return None
    try:
        return out.encode("utf-8")
    except UnicodeEncodeError:
        return None


#: Scanner decode order; doubles as the attribution tie-break when several
#: decoders accept the same token (e.g. pure-alphanumeric base64).
DECODERS: tuple[tuple[str, object], ...] = (
    ("base64_std_padded", decode_base64_std),
    ("base64_urlsafe_unpadded", decode_base64_urlsafe),
    ("percent_encoding", decode_percent),
    ("lzstring_base64", decode_lzstring),
)
