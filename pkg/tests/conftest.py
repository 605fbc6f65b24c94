from __future__ import annotations

import functools
import json
from pathlib import Path

import pytest

from kahlerval.branch import parse_branch, random_campaign
from kahlerval.engine import construct_cx_basis

CURVES = Path(__file__).resolve().parent.parent / "curves"

# seed shared by the oracle, semimodule and singular-direction campaigns
CAMPAIGN_SEED = 2024
CAMPAIGN_SIZE = 24


def running_example():
    return parse_branch(15, [(18, 1), (24, 1), (25, 1), (26, 1)])


def cusp():
    return parse_branch(2, [(3, 1)])


def genus2_n4():
    return parse_branch(4, [(6, 1), (7, 1)])


@functools.lru_cache(maxsize=None)
def campaign():
    return tuple(random_campaign(CAMPAIGN_SEED, CAMPAIGN_SIZE))


@functools.lru_cache(maxsize=None)
def basis_of(b):
    return construct_cx_basis(b)


def fixed_branches():
    return [cusp(), parse_branch(2, [(3, 1), (5, 1)]), parse_branch(3, [(4, 1)]),
            genus2_n4(), running_example()]


@pytest.fixture
def curve_file(tmp_path):
    def write(doc, name="c.json"):
        p = tmp_path / name
        p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(p)
    return write
