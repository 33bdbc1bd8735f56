from __future__ import annotations

import pytest

from politeplan.channel import all_safe_channel, mt_lossy_channel
from politeplan.lexicon import default_lexicon
from politeplan.perception import average_model
from politeplan.planner import Circumstance


@pytest.fixture(scope="session")
def lex():
    return default_lexicon()


@pytest.fixture(scope="session")
def avg():
    return average_model()


@pytest.fixture(scope="session")
def lossy_circ(lex, avg):
    """Average perception on both ends, lossy MT channel."""
    return Circumstance(sender=avg, receiver=avg, channel=mt_lossy_channel(lex), lexicon=lex)


@pytest.fixture(scope="session")
def safe_circ(lex, avg):
    """Average perception on both ends, perfect channel."""
    return Circumstance(sender=avg, receiver=avg, channel=all_safe_channel(lex), lexicon=lex)
