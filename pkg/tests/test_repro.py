import os

from listop.repro import DEFAULT_CAP, derive_seed, label_hash, map_ordered, resolve_cap, splitmix64


def test_splitmix_known_values():
    # first outputs of the reference SplitMix64 generator seeded with 0
    state = 0
    outs = []
    for _ in range(3):
        state = (state + 0x9E3779B97F4A7C15) & ((1 << 64) - 1)
        outs.append(splitmix64(state))
    assert outs == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_derive_seed_is_pure_and_separates_streams():
    a = derive_seed(7, "trial", 3)
    assert a == derive_seed(7, "trial", 3)
    assert a != derive_seed(7, "trial", 4)
    assert a != derive_seed(7, "lambda", 3)
    assert 0 <= a < 1 << 64


def test_label_hash_stable():
    assert label_hash("trial") == label_hash("trial")
    assert label_hash("trial") != label_hash("lambda")


def test_cap_env_override(monkeypatch):
    monkeypatch.delenv("LISTOP_BUDGET", raising=False)
    assert resolve_cap(None) == DEFAULT_CAP
    monkeypatch.setenv("LISTOP_BUDGET", "0x100")
    assert resolve_cap(None) == 256
    assert resolve_cap(5) == 5


def test_map_ordered_keeps_order():
    assert map_ordered(lambda x: x * x, range(20), threads=4) == [x * x for x in range(20)]
