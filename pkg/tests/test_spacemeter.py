import json
import random

import pytest

from brmq.codec import deserialize, serialize
from brmq.core import Array2D
from brmq.encodings import ENCODINGS
from brmq.rmq1d import OneSided1D
from brmq.rmq2d import TwoSidedStaircase
from brmq.spacemeter import Component, SpaceReport, emit_report, measure


def test_onesided_bit_payload():
    r = measure(OneSided1D([1, 0, 1], sparse=False))
    assert r.bits("B/bits") == 3
    assert r.bits("B") == r.total_bits >= 3


def test_staircase_single_level_payload():
    r = measure(TwoSidedStaircase(Array2D([[0]], 1)))
    assert r.bits("paths/0/bits") == 4


def test_emit_report():
    text = emit_report(measure(OneSided1D([2, 1])))
    assert "total_bits" in json.loads(text)
    rep = SpaceReport("toy", 0, {"n": 4}, Component("toy", "group", 8))
    assert json.loads(emit_report(rep))["bits_per_element"] == 2.0


def test_component_lookup_errors():
    r = measure(OneSided1D([2, 1]))
    with pytest.raises(KeyError):
        r.component("B/nope")


def test_children_sum_to_parent():
    rng = random.Random(0)
    a = Array2D([[rng.randrange(3) for _ in range(12)] for _ in range(5)], 3)

    def check(c):
        if c.children:
            assert c.bits == sum(k.bits for k in c.children)
            for k in c.children:
                check(k)

    for info in ENCODINGS.values():
        b = a if not info.one_dim else Array2D(a.cells[:1], 3)
        if info.applicable(b):
            check(measure(info.build(b)).root)


@pytest.mark.parametrize("name", list(ENCODINGS))
def test_measure_survives_reload(name):
    info = ENCODINGS[name]
    rng = random.Random(len(name))
    sigma = 2 if info.max_sigma == 2 else 4
    m = 1 if info.one_dim else 6
    a = Array2D([[rng.randrange(sigma) for _ in range(300)] for _ in range(m)], sigma)
    for pol in info.policies:
        s = info.build(a, pol)
        blob, nbits = serialize(s)
        assert measure(deserialize(blob)).to_dict() == measure(s).to_dict()
        assert nbits == measure(s).total_bits
