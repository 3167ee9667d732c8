"""Striped shard storage: one directory per node, a text manifest at the root.

Layout under the root directory::

    manifest.txt
    node_1/data.shard ... node_<k+r>/data.shard

A shard is the node's row (r cells of B bytes) for stripe 0, then stripe 1,
and so on, with no headers.
"""

import hashlib
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import codec
from .gf import POLY
from .layout import Grouping, build_plan
from .mds import CodeParams, build_parity_matrix

log = logging.getLogger(__name__)

MANIFEST = "manifest.txt"
VERSION = 1
DEFAULT_BLOCK_SIZE = 4096


class StoreError(RuntimeError):
    pass


class Unrecoverable(StoreError):
    pass


def checksum(data: bytes) -> str:
    return hashlib.blake2b(data, digest_size=8).hexdigest()


@dataclass
class Manifest:
    k: int
    r: int
    sizes: tuple
    strategy: str
    block_size: int
    file_length: int
    stripes: int
    checksums: dict = field(default_factory=dict)
    field_poly: int = POLY
    version: int = VERSION

    @property
    def t(self) -> int:
        return len(self.sizes)

    @property
    def params(self) -> CodeParams:
        return CodeParams(self.k, self.r)

    @property
    def grouping(self) -> Grouping:
        return Grouping(self.sizes)

    @property
    def shard_size(self) -> int:
        return self.stripes * self.r * self.block_size

    def codec_parts(self):
        params = self.params
        return params, build_parity_matrix(params), build_plan(params, self.grouping, self.strategy)

    def to_text(self) -> str:
        lines = [
            f"version = {self.version}",
            f"k = {self.k}",
            f"r = {self.r}",
            f"t = {self.t}",
            f"sizes = {','.join(map(str, self.sizes))}",
            f"strategy = {self.strategy}",
            f"block_size = {self.block_size}",
            f"field_poly = 0x{self.field_poly:X}",
            f"file_length = {self.file_length}",
            f"stripes = {self.stripes}",
        ]
        lines += [f"checksum.{n} = {self.checksums[n]}" for n in sorted(self.checksums)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Manifest":
        kv = {}
        for line in text.splitlines():
            if line.strip() and not line.startswith("#"):
                key, _, value = line.partition("=")
                kv[key.strip()] = value.strip()
        try:
            m = cls(
                k=int(kv["k"]),
                r=int(kv["r"]),
                sizes=tuple(int(s) for s in kv["sizes"].split(",")),
                strategy=kv["strategy"],
                block_size=int(kv["block_size"]),
                file_length=int(kv["file_length"]),
                stripes=int(kv["stripes"]),
                checksums={int(key.split(".", 1)[1]): v for key, v in kv.items() if key.startswith("checksum.")},
                field_poly=int(kv["field_poly"], 0),
                version=int(kv["version"]),
            )
        except (KeyError, ValueError) as exc:
            raise StoreError(f"malformed manifest: {exc}") from exc
        if m.t != int(kv.get("t", m.t)):
            raise StoreError("malformed manifest: t does not match sizes")
        if m.field_poly != POLY:
            raise StoreError(f"unsupported field polynomial 0x{m.field_poly:X}")
        return m

    def save(self, root):
        Path(root, MANIFEST).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def load(cls, root) -> "Manifest":
        return cls.from_text(Path(root, MANIFEST).read_text(encoding="utf-8"))


def shard_path(root, node: int) -> Path:
    return Path(root, f"node_{node}", "data.shard")


def ingest(data: bytes, root, params: CodeParams, grouping: Grouping,
           strategy: str = "even", block_size: int = DEFAULT_BLOCK_SIZE) -> Manifest:
    if block_size < 1:
        raise ValueError("block size must be >= 1")
    pm = build_parity_matrix(params)
    plan = build_plan(params, grouping, strategy)
    k, r = params.k, params.r
    stripe_bytes = k * r * block_size
    stripes = math.ceil(len(data) / stripe_bytes)
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    hashes = [hashlib.blake2b(digest_size=8) for _ in range(k + r)]
    files = []
    try:
        for n in range(1, k + r + 1):
            shard_path(root, n).parent.mkdir(exist_ok=True)
            files.append(open(shard_path(root, n), "wb"))
        for s in range(stripes):
            chunk = data[s * stripe_bytes:(s + 1) * stripe_bytes]
            buf = np.zeros(stripe_bytes, dtype=np.uint8)
            buf[:len(chunk)] = np.frombuffer(chunk, dtype=np.uint8)
            stripe = codec.encode_stripe(params, pm, plan, buf.reshape(k, r, block_size))
            for n in range(k + r):
                row = stripe[n].tobytes()
                files[n].write(row)
                hashes[n].update(row)
    finally:
        for f in files:
            f.close()
    manifest = Manifest(k, r, grouping.sizes, strategy, block_size, len(data), stripes,
                        {n + 1: h.hexdigest() for n, h in enumerate(hashes)})
    manifest.save(root)
    log.info("ingested %d bytes into %d stripes", len(data), stripes)
    return manifest


def load_shard(root, manifest: Manifest, node: int):
    """Shard of ``node`` as an array (stripes, r, B), or None if missing or corrupt."""
    path = shard_path(root, node)
    try:
        raw = path.read_bytes()
    except OSError:
        return None
    if len(raw) != manifest.shard_size or checksum(raw) != manifest.checksums.get(node):
        log.warning("shard %s fails verification; treating as missing", path)
        return None
    return np.frombuffer(raw, dtype=np.uint8).reshape(manifest.stripes, manifest.r, manifest.block_size)


def verify(root, manifest: Manifest | None = None) -> dict:
    """Map node -> True if its shard is present and matches the manifest checksum."""
    manifest = manifest or Manifest.load(root)
    return {n: load_shard(root, manifest, n) is not None for n in range(1, manifest.k + manifest.r + 1)}


def reassemble(root, manifest: Manifest | None = None) -> bytes:
    manifest = manifest or Manifest.load(root)
    params, pm, plan = manifest.codec_parts()
    k, r = params.k, params.r
    shards = {n: load_shard(root, manifest, n) for n in range(1, k + r + 1)}
    shards = {n: s for n, s in shards.items() if s is not None}
    if len(shards) < k:
        raise Unrecoverable(f"unrecoverable: {len(shards)} valid shards, need {k}")
    if all(n in shards for n in range(1, k + 1)):
        out = np.stack([shards[n] for n in range(1, k + 1)], axis=1)
    else:
        out = np.empty((manifest.stripes, k, r, manifest.block_size), dtype=np.uint8)
        for s in range(manifest.stripes):
            out[s] = codec.decode_stripe(params, pm, plan, {n: sh[s] for n, sh in shards.items()})
    return out.tobytes()[:manifest.file_length]


def repair_node_dir(root, failed: int, manifest: Manifest | None = None):
    """Rebuild the shard of ``failed`` from all other nodes.

    Returns the aggregate TrafficReport over all stripes.
    """
    manifest = manifest or Manifest.load(root)
    params, pm, plan = manifest.codec_parts()
    n_nodes = params.k + params.r
    if not 1 <= failed <= n_nodes:
        raise ValueError(f"node {failed} out of range 1..{n_nodes}")
    shards = {n: load_shard(root, manifest, n) for n in range(1, n_nodes + 1) if n != failed}
    missing = sorted(n for n, s in shards.items() if s is None)
    if missing:
        raise Unrecoverable(f"nodes {[failed] + missing} missing; single-node repair only, use reassemble")
    total = codec.TrafficReport()
    rows = []
    for s in range(manifest.stripes):
        fetch = lambda node, col, s=s: shards[node][s, col - 1]
        row, report = codec.repair_node(params, pm, plan, failed, fetch)
        rows.append(row)
        total = total + report
    data = np.stack(rows).tobytes() if rows else b""
    if checksum(data) != manifest.checksums.get(failed):
        raise StoreError(f"repaired shard of node {failed} does not match manifest checksum")
    path = shard_path(root, failed)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    return total

