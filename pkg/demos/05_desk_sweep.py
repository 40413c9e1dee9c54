"""
A small sweep with a checkpoint
===============================

The sweep walks c in shards.  Each admissible c is factored, split into
representations, and every remaining exponent pair is checked with exact
Gaussian integer powers.  State is written after each shard so a run can
stop and resume.
"""

import json
import tempfile
from pathlib import Path

from expdio.certificates import Certificate, replay
from expdio.sweep import SweepConfig, sweep

out = Path(tempfile.mkdtemp())
cfg = SweepConfig(c_min=85, c_max=50000, shard_size=5000, output_dir=str(out))

# stop after three shards ...
part = sweep(cfg, max_shards=3)
print(part.status, part.shards_done, "/", part.shards_total)

# ... and pick up where it left off
full = sweep(cfg, resume=True)
print(full.summary())

# a fresh run gives the same digest
print(sweep(SweepConfig(c_min=85, c_max=50000, shard_size=12500)).digest == full.digest)

# every shard carries a replayable certificate
certs = json.loads((out / "certificates.json").read_text())
print(all(replay(Certificate.from_dict(c)) for c in certs))
