"""Codec compatible with the lz-string JavaScript library's
compressToBase64 / decompressFromBase64 pair.

The format packs variable-width LZ78-style dictionary codes into 6-bit
symbols over the base64 alphabet, padded with ``=`` to a multiple of 4.
It is NOT RFC 4648 base64 of a byte stream — the empty string compresses
to ``"Q==="`` — and it operates on UTF-16 code units like the original
implementation, so surrogate pairs survive a round trip.
"""

from __future__ import annotations

_KEY = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/="
_REV = {c: i for i, c in enumerate(_KEY)}
_BITS_PER_CHAR = 6
_RESET = 1 << (_BITS_PER_CHAR - 1)


def _to_units(s: str) -> str:
    # Re-express the string as UTF-16 code units (one char per unit) so
    # charCodeAt/fromCharCode semantics carry over for non-BMP input.
    if all(ord(c) < 0x10000 for c in s):
        return s
    b = s.encode("utf-16-be")
    return "".join(chr((b[i] << 8) | b[i + 1]) for i in range(0, len(b), 2))


def _from_units(u: str) -> str | None:
    try:
        return u.encode("utf-16-be", "surrogatepass").decode("utf-16-be")
    except UnicodeError:
        # Lone surrogates: representable in JS strings but not meaningful
        # text; callers treat this as a failed decode.
        return None


def compress_to_base64(s: str) -> str:
    res = _compress(_to_units(s))
    return res + "=" * (-len(res) % 4)


def _compress(uncompressed: str) -> str:
    dictionary: dict[str, int] = {}
    to_create: dict[str, bool] = {}
    w = ""
    enlarge_in = 2
    dict_size = 3
    num_bits = 2
    data: list[str] = []
    val = 0
    pos = 0

    def push_bits(value: int, nbits: int) -> None:
        nonlocal val, pos
        for _ in range(nbits):
            val = (val << 1) | (value & 1)
            if pos == _BITS_PER_CHAR - 1:
                pos = 0
                data.append(_KEY[val])
                val = 0
            else:
                pos += 1
            value >>= 1

    def produce_w() -> None:
        nonlocal enlarge_in, num_bits
        if w in to_create:
            code = ord(w[0])
            if code < 256:
                push_bits(0, num_bits)
                push_bits(code, 8)
            else:
                push_bits(1, num_bits)
                push_bits(code, 16)
            enlarge_in -= 1
            if enlarge_in == 0:
                enlarge_in = 1 << num_bits
                num_bits += 1
            del to_create[w]
        else:
            push_bits(dictionary[w], num_bits)
        enlarge_in -= 1
        if enlarge_in == 0:
            enlarge_in = 1 << num_bits
            num_bits += 1

    for c in uncompressed:
        if c not in dictionary:
            dictionary[c] = dict_size
            dict_size += 1
            to_create[c] = True
        wc = w + c
        if wc in dictionary:
            w = wc
        else:
            produce_w()
            dictionary[wc] = dict_size
            dict_size += 1
            w = c

    if w != "":
        produce_w()

    push_bits(2, num_bits)  # end-of-stream marker

    while True:
        val <<= 1
        if pos == _BITS_PER_CHAR - 1:
            data.append(_KEY[val])
            break
        pos += 1

    return "".join(data)


def decompress_from_base64(inp: str) -> str | None:
    """Inverse of :func:`compress_to_base64`.

    Returns None for undecodable input. Trailing ``=`` padding is optional:
    decoding stops at the end-of-stream marker, never at the pad. Truncated
    streams decode to ``""`` like the reference implementation.
    """
    if inp == "":
        return None
    out = _decompress(inp)
    return None if out is None else _from_units(out)


def _decompress(inp: str) -> str | None:
    length = len(inp)

    def get(i: int) -> int:
        if i >= length:
            return 0
        return _REV.get(inp[i], 0)

    val = get(0)
    pos = _RESET
    idx = 1

    def read_bits(n: int) -> int:
        nonlocal val, pos, idx
        bits = 0
        power = 1
        for _ in range(n):
            resb = val & pos
            pos >>= 1
            if pos == 0:
                pos = _RESET
                val = get(idx)
                idx += 1
            if resb:
                bits |= power
            power <<= 1
        return bits

    dictionary: list[str | None] = [None, None, None]  # codes 0-2 are control codes
    enlarge_in = 4
    num_bits = 3

    first = read_bits(2)
    if first == 0:
        c = chr(read_bits(8))
    elif first == 1:
        c = chr(read_bits(16))
    elif first == 2:
        return ""
    else:
        return None

    dictionary.append(c)
    w = c
    result = [c]

    while True:
        if idx > length:
            return ""
        code = read_bits(num_bits)
        if code == 0:
            dictionary.append(chr(read_bits(8)))
            code = len(dictionary) - 1
            enlarge_in -= 1
        elif code == 1:
            dictionary.append(chr(read_bits(16)))
            code = len(dictionary) - 1
            enlarge_in -= 1
        elif code == 2:
            return "".join(result)

        if enlarge_in == 0:
            enlarge_in = 1 << num_bits
            num_bits += 1

        if code < len(dictionary) and dictionary[code] is not None:
            entry = dictionary[code]
        elif code == len(dictionary):
            entry = w + w[0]
        else:
            return None
        assert entry is not None
        result.append(entry)

        dictionary.append(w + entry[0])
        enlarge_in -= 1
        w = entry

        if enlarge_in == 0:
            enlarge_in = 1 << num_bits
            num_bits += 1
