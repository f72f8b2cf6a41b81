"""Counter-based random streams (Philox-4x32-10).

A stream is addressed by a (master_seed, stream_index) pair.  The pair is
hashed into a 64-bit Philox key; the block counter is the draw position, so a
stream is a pure function of (key, position).  That buys two properties the
ensemble code relies on:

* identical (master_seed, stream_index) reproduce identical output bit for
  bit, no matter how work is chunked over threads or processes;
* distinct pairs select distinct Philox keys, i.e. statistically independent
  streams.

Draw protocol (shared with the numba kernels in :mod:`magphon.kinetic`):
position ``j`` addresses 32-bit word ``j & 3`` of Philox block ``j >> 2``;
the blocks of a key are enumerated from counter 0.  ``uniforms32`` maps one
word ``w`` to ``(w + 0.5) * 2**-32`` (strictly inside (0, 1)), ``uniforms``
builds a 53-bit uniform from two consecutive words, and ``normals`` applies
Box-Muller to 53-bit pairs.
"""

from dataclasses import dataclass

import numpy as np

_MASK32 = np.uint64(0xFFFFFFFF)
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_SHIFT32 = np.uint64(32)

_U64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_CHILD_SALT = 0xD1B54A32D192ED03


def mix64(z):
    """SplitMix64 finalizer; avalanche a 64-bit integer (python int in/out)."""
    z &= _U64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
    return z ^ (z >> 31)


def _mix64_array(z):
    z = z.astype(np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def philox_words(key, start, count):
    """Words ``start .. start+count-1`` of the stream with 64-bit ``key``.

    Returns a uint64 array whose entries are 32-bit Philox-4x32-10 outputs.
    Vectorised over whole blocks; bit-identical to the scalar kernel twin.
    """
    if count <= 0:
        return np.empty(0, dtype=np.uint64)
    b0 = start >> 2
    b1 = (start + count + 3) >> 2
    blocks = np.arange(b0, b1, dtype=np.uint64)
    c0 = blocks & _MASK32
    c1 = (blocks >> _SHIFT32) & _MASK32
    c2 = np.zeros_like(blocks)
    c3 = np.zeros_like(blocks)
    k0 = np.uint64(key & 0xFFFFFFFF)
    k1 = np.uint64((key >> 32) & 0xFFFFFFFF)
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = (
            (p1 >> _SHIFT32) ^ c1 ^ k0,
            p1 & _MASK32,
            (p0 >> _SHIFT32) ^ c3 ^ k1,
            p0 & _MASK32,
        )
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    words = np.empty(blocks.size * 4, dtype=np.uint64)
    words[0::4] = c0
    words[1::4] = c1
    words[2::4] = c2
    words[3::4] = c3
    off = start - (b0 << 2)
    return words[off:off + count]


@dataclass(frozen=True)
class RngStream:
    """Immutable address of one random stream."""

    master_seed: int
    stream_index: int = 0

    @property
    def key(self):
        """64-bit Philox key for this (master_seed, stream_index) pair."""
        base = mix64(self.master_seed & _U64)
        return mix64((base + (self.stream_index & _U64) * _GOLDEN) & _U64)

    def substream(self, index):
        """Derive an independent child stream (hashed, collision-safe)."""
        child = mix64((mix64((self.stream_index + _CHILD_SALT) & _U64)
                       + (index & _U64) * _GOLDEN) & _U64)
        return RngStream(self.master_seed, child)

    def substream_keys(self, count, offset=0):
        """Philox keys of ``substream(offset) .. substream(offset+count-1)``.

        Vectorised helper for per-path ensemble kernels.
        """
        idx = np.arange(offset, offset + count, dtype=np.uint64)
        inner = np.uint64(mix64((self.stream_index + _CHILD_SALT) & _U64))
        child = _mix64_array(inner + idx * np.uint64(_GOLDEN))
        base = np.uint64(mix64(self.master_seed & _U64))
        return _mix64_array(base + child * np.uint64(_GOLDEN))

    def cursor(self):
        return RngCursor(self.key)


class RngCursor:
    """Sequential consumer of one stream; tracks the word position."""

    __slots__ = ("key", "position")

    def __init__(self, key):
        self.key = int(key)
        self.position = 0

    def words(self, count):
        out = philox_words(self.key, self.position, count)
        self.position += count
        return out

    def uniforms32(self, count):
        """Uniforms in (0,1) with 32-bit granularity (one word per draw)."""
        return (self.words(count).astype(np.float64) + 0.5) * 2.0 ** -32

    def uniforms(self, count):
        """Uniforms in (0,1) with 53-bit mantissas (two words per draw)."""
        w = self.words(2 * count)
        hi = w[0::2]
        lo = w[1::2]
        v = ((hi << _SHIFT32) | lo) >> np.uint64(11)
        return (v.astype(np.float64) + 0.5) * 2.0 ** -53

    def normals(self, count):
        """Standard normals via Box-Muller on 53-bit uniform pairs."""
        pairs = (count + 1) // 2
        u1 = self.uniforms(pairs)
        u2 = self.uniforms(pairs)
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(2.0 * np.pi * u2)
        z[1::2] = r * np.sin(2.0 * np.pi * u2)
        return z[:count]
