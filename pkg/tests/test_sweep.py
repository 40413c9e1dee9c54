import json

import mpmath
import pytest

from expdio.certificates import Certificate, replay
from expdio.representations import FactorLimitExceeded, decompose
from expdio.sweep import (ConfigError, SweepConfig, angle_exceptions, candidate_pairs, prefilter,
                          process_c, run_shard, shard_certificate, sweep)

SMALL = dict(c_min=85, c_max=6000, shard_size=512)


def test_single_value():
    rep = sweep(SweepConfig(c_min=85, c_max=86))
    assert rep.status == "verified" and rep.admissible == 1 and rep.reps == 2


def test_empty_range():
    rep = sweep(SweepConfig(c_min=1000, c_max=1000))
    assert rep.shards_total == 0 and rep.admissible == 0 and rep.digest == 0
    assert rep.status == "verified"


def test_prefilter_matches_definition():
    def ok(c):
        if c % 8 != 5:
            return False
        n, p = c, 3
        while p * p <= n:
            while n % p == 0:
                if p % 4 == 3:
                    return False
                n //= p
            p += 2
        return n == 1 or n % 4 == 1
    assert [int(c) for c in prefilter(85, 3000)] == [c for c in range(85, 3000) if ok(c)]


def test_first_hundred_thousand():
    rep = sweep(SweepConfig(c_min=85, c_max=10 ** 5, shard_size=20000))
    assert rep.status == "verified" and not rep.survivors
    assert (rep.admissible, rep.reps) == (2409, 5558)


@pytest.mark.parametrize("width", [4, 16])
def test_digest_independent_of_width(width, monkeypatch):
    monkeypatch.delenv("EXPDIO_WORKERS", raising=False)
    ref = sweep(SweepConfig(**SMALL))
    got = sweep(SweepConfig(**SMALL, width=width))
    assert got.digest == ref.digest and got.admissible == ref.admissible


def test_digest_independent_of_shard_size():
    a = sweep(SweepConfig(**SMALL))
    b = sweep(SweepConfig(c_min=85, c_max=6000, shard_size=2000))
    assert a.digest == b.digest


def test_worker_env_override(monkeypatch):
    monkeypatch.setenv("EXPDIO_WORKERS", "3")
    assert SweepConfig(**SMALL).effective_width() == 3
    monkeypatch.setenv("EXPDIO_WORKERS", "zero")
    with pytest.raises(ConfigError):
        SweepConfig(**SMALL).effective_width()


def test_resume_matches_uninterrupted(tmp_path):
    cfg = SweepConfig(**SMALL, output_dir=str(tmp_path))
    part = sweep(cfg, max_shards=3)
    assert part.status == "incomplete" and part.shards_done == 3
    full = sweep(cfg, resume=True)
    ref = sweep(SweepConfig(**SMALL))
    assert full.status == "verified" and full.digest == ref.digest
    assert full.shards_done == full.shards_total
    certs = json.loads((tmp_path / "certificates.json").read_text())
    assert len(certs) == full.shards_total


def test_resume_without_state(tmp_path):
    with pytest.raises(ConfigError):
        sweep(SweepConfig(**SMALL, output_dir=str(tmp_path)), resume=True)


@pytest.mark.parametrize("exc", [FactorLimitExceeded(101, {}), ArithmeticError("synthetic")])
def test_quarantine(exc):
    def hook(c):
        if c == 101:
            raise exc
    rep = sweep(SweepConfig(c_min=85, c_max=200, shard_size=64), hook=hook)
    assert rep.status == "incomplete"
    assert [q["c"] for q in rep.quarantined] == [101]
    assert "QUARANTINED c=101" in rep.summary()


@pytest.mark.parametrize("bad", [
    dict(c_min=10), dict(c_max=50), dict(n_cap=5), dict(r_max=4), dict(r_max=9, z_max=9),
    dict(y_menu=[8]), dict(width=0), dict(shard_size=0)])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        SweepConfig(**bad)


def test_config_unknown_key_and_load(tmp_path):
    with pytest.raises(ConfigError):
        SweepConfig.from_dict({"c_min": 85, "colour": "red"})
    p = tmp_path / "cfg.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        SweepConfig.load(p)
    p.write_text(json.dumps({"c_min": 85, "c_max": 100}))
    assert SweepConfig.load(p).c_max == 100


def test_default_candidate_pairs():
    got = candidate_pairs([], [], 55000 - 2, 55001)
    assert got == [(3, 5), (3, 7), (3, 9), (5, 7), (5, 9), (7, 9), (7, 11), (9, 11), (9, 13), (9, 15)]


@pytest.mark.parametrize("c", [85, 221, 1105, 5525])
def test_angle_exceptions_against_direct_scan(c):
    mpmath.mp.prec = 200
    tau = mpmath.mpf(1) / 2 - 1 / (2 * mpmath.sqrt(3))
    for rep in decompose(c):
        exc = set(angle_exceptions(rep, 1500))
        x = 2 * mpmath.atan2(rep.v, rep.u) / mpmath.pi
        for n in range(11, 1500, 2):
            if n in exc:
                continue
            d = abs(n * x - mpmath.nint(n * x))
            assert d > mpmath.mpf(c) ** (-tau * n)


def test_process_c_records():
    rec = process_c(85, SweepConfig(c_min=85, c_max=86))
    assert rec.reps == [[6, 7], [2, 9]] or sorted(map(tuple, rec.reps)) == [(2, 9), (6, 7)]
    assert rec.survivors == [] and rec.pairs > 0
    assert process_c(89, SweepConfig(c_min=85, c_max=90)) is None    # 89 = 1 mod 8


def test_shard_certificate_replays():
    cfg = SweepConfig(c_min=85, c_max=1000)
    s = run_shard(85, 1000, cfg)
    cert = Certificate.from_json(shard_certificate(s, cfg).to_json())
    assert cert.verdict.startswith("done;survivors=0")
    assert replay(cert)
