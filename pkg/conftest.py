import hypothesis
import pytest

from src.dictionary import DictionaryConfig
from src.gadget import GadgetParams
from src.io_model import PagedMemory

hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=100, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False, deadline=None)
hypothesis.settings.load_profile("ci")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale run, minutes rather than seconds")


@pytest.fixture
def mem():
    """64 words of 64 bits: b = 4096"""
    return PagedMemory(page_words=64, word_bits=64)


@pytest.fixture
def small_mem():
    """4 words of 64 bits: b = 256, for quick gadget tests"""
    return PagedMemory(page_words=4, word_bits=64)


@pytest.fixture
def flush_params():
    """t=16 gadget with 32-bit elements: 8 per block, 128 blocks per big flush"""
    return GadgetParams(t=16, t_min=4, b=256, backptr_bits=16)


@pytest.fixture
def small_config():
    """b = 512, m_keys = 4096, node gadgets with t = 16 over a t_min = 4 base"""
    return DictionaryConfig(n_max=1 << 12, page_words=16, word_bits=32, cache_words=1 << 13,
                            lam=8, seed=7)
