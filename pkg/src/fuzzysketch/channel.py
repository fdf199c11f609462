"""Synthetic matching / non-matching channels and template file I/O.

The matching channel flips each bit of an enrolled template independently,
optionally adds bursts, and erases a uniformly random set of positions. The
non-matching channel is the same process with flip probability 1/2, which
for the decoder is distributed like an unrelated template.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .capacity import ChannelSample
from .sketch import Template


class ChannelError(ValueError):
    pass


class TemplateFormatError(ValueError):
    pass


class ChannelKind(str, enum.Enum):
    MATCHING = "matching"
    NON_MATCHING = "non_matching"


class BurstMode(str, enum.Enum):
    FLIP = "flip"  # every bit of a burst is inverted
    RANDOM = "random"  # every bit of a burst is replaced by a fair coin


@dataclass(frozen=True)
class ChannelModel:
    kind: ChannelKind = ChannelKind.MATCHING
    error_rate: float = 0.0
    erasure_range: tuple[int, int] = (0, 0)
    burst: tuple[int, int] | None = None  # (burst_count, burst_length)
    seed: int = 0
    burst_mode: BurstMode = BurstMode.FLIP

    def __post_init__(self):
        object.__setattr__(self, "kind", ChannelKind(self.kind))
        object.__setattr__(self, "burst_mode", BurstMode(self.burst_mode))
        if not 0.0 <= self.error_rate <= 1.0:
            raise ChannelError(f"error rate {self.error_rate} outside [0, 1]")
        lo, hi = self.erasure_range
        if not 0 <= lo <= hi:
            raise ChannelError(f"bad erasure range {self.erasure_range}")
        if self.burst is not None and (self.burst[0] < 0 or self.burst[1] < 1):
            raise ChannelError(f"bad burst spec {self.burst}")

    @classmethod
    def non_matching(cls, seed: int = 0, erasure_range: tuple[int, int] = (0, 0)) -> "ChannelModel":
        return cls(ChannelKind.NON_MATCHING, 0.5, erasure_range, None, seed)

    def check_length(self, n: int) -> None:
        if self.erasure_range[1] > n:
            raise ChannelError(f"erasure range {self.erasure_range} exceeds template length {n}")
        if self.burst is not None and self.burst[1] > n:
            raise ChannelError(f"burst length {self.burst[1]} exceeds template length {n}")


def sample_pair(model: ChannelModel, base: Template, rng: np.random.Generator | None = None) -> Template:
    """Draw a probe template from ``base`` through the channel.

    Without ``rng`` the draw uses a fresh generator seeded with ``model.seed``.
    """
    n = base.length
    model.check_length(n)
    if rng is None:
        rng = np.random.default_rng(model.seed)
    code = base.code ^ (rng.random(n) < model.error_rate).astype(np.uint8)
    if model.burst is not None:
        count, length = model.burst
        for start in rng.integers(0, n - length + 1, size=count):
            if model.burst_mode is BurstMode.FLIP:
                code[start : start + length] ^= 1
            else:
                code[start : start + length] = rng.integers(0, 2, size=length, dtype=np.uint8)
    mask = base.mask.copy()
    n_erased = int(rng.integers(model.erasure_range[0], model.erasure_range[1] + 1))
    mask[rng.choice(n, size=n_erased, replace=False)] = 0
    return Template(code, mask)


def channel_sample(base: Template, probe: Template) -> ChannelSample:
    joint = base.mask & probe.mask
    w_n = int(((base.code ^ probe.code) & joint).sum())
    return ChannelSample(w_n, int(base.length - joint.sum()), base.length)


def empirical_distribution(model: ChannelModel, base: Template, trials: int) -> list[ChannelSample]:
    if trials < 1:
        raise ChannelError("trials must be >= 1")
    rng = np.random.default_rng(model.seed)
    return [channel_sample(base, sample_pair(model, base, rng)) for _ in range(trials)]


def random_template(n: int, rng: np.random.Generator) -> Template:
    return Template.full_mask(rng.integers(0, 2, size=n, dtype=np.uint8))


# Template files: binary records (4-byte big-endian N, code bits, mask bits,
# MSB first) or text lines "code_hex,mask_hex".


def template_to_record(t: Template) -> bytes:
    if t.length % 8:
        raise TemplateFormatError("template length must be a multiple of 8")
    return t.length.to_bytes(4, "big") + np.packbits(t.code).tobytes() + np.packbits(t.mask).tobytes()


def write_templates(path: str | Path, templates, text: bool = False) -> None:
    path = Path(path)
    if text:
        lines = [f"{np.packbits(t.code).tobytes().hex()},{np.packbits(t.mask).tobytes().hex()}\n" for t in templates]
        path.write_text("".join(lines), encoding="ascii", newline="\n")
    else:
        path.write_bytes(b"".join(template_to_record(t) for t in templates))


def _iter_binary(data: bytes) -> Iterator[Template]:
    pos = 0
    while pos < len(data):
        if pos + 4 > len(data):
            raise TemplateFormatError("truncated record header")
        n = int.from_bytes(data[pos : pos + 4], "big")
        if n == 0 or n % 8:
            raise TemplateFormatError(f"record length {n} is not a positive multiple of 8")
        nbytes = n // 8
        end = pos + 4 + 2 * nbytes
        if end > len(data):
            raise TemplateFormatError("truncated template record")
        body = np.frombuffer(data[pos + 4 : end], dtype=np.uint8)
        yield Template(np.unpackbits(body[:nbytes]), np.unpackbits(body[nbytes:]))
        pos = end


def _iter_text(text: str) -> Iterator[Template]:
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            code_hex, mask_hex = line.split(",")
            code = np.unpackbits(np.frombuffer(bytes.fromhex(code_hex), dtype=np.uint8))
            mask = np.unpackbits(np.frombuffer(bytes.fromhex(mask_hex), dtype=np.uint8))
            yield Template(code, mask)
        except ValueError as exc:
            raise TemplateFormatError(f"line {lineno}: {exc}") from None


def read_templates(path: str | Path) -> list[Template]:
    """Read a template file, detecting hex-text versus binary records."""
    data = Path(path).read_bytes()
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError:
        text = None
    if text is not None and text.strip() and all(c in "0123456789abcdefABCDEF,\r\n \t" for c in text):
        templates = list(_iter_text(text))
    else:
        templates = list(_iter_binary(data))
    if not templates:
        raise TemplateFormatError(f"{path}: no templates")
    return templates
