"""Channel behaviour: retention policies and symbol noise."""

import numpy as np
import pytest

from xmodal import (
    MISSING,
    Modality,
    ModalityParams,
    PrefixRetention,
    SerialDecayRetention,
    Style,
    default_config,
    encode,
    perceive,
)

CFG = default_config()


def _params(retention, p=0.0):
    return ModalityParams(
        rate_wps=4.0, alpha=0.1, beta=0.2, symbol_noise_p=p, retention=retention
    )


def _message(values=(0.5, -0.4, 0.3, -0.2, 0.1), style=Style.DETAILED):
    return encode(list(values), Modality.TEXT, style, CFG)


def test_prefix_keeps_first_capacity_symbols_exactly():
    message = _message()
    params = _params(PrefixRetention(capacity=2))
    percept = perceive(
        message, params, np.random.default_rng(0), np.random.default_rng(1)
    )
    assert percept.retained_count == 2
    assert percept.corrupted_count == 0
    # presentation order is magnitude-descending: features 0 and 1 lead
    assert percept.perceived[0] == message.symbols[0]
    assert percept.perceived[1] == message.symbols[1]
    assert all(percept.perceived[i] is MISSING for i in (2, 3, 4))


def test_prefix_capacity_beyond_message_keeps_everything():
    message = _message()
    params = _params(PrefixRetention(capacity=50))
    percept = perceive(
        message, params, np.random.default_rng(0), np.random.default_rng(1)
    )
    assert percept.retained_count == len(message.symbols)
    assert all(sym is not MISSING for sym in percept.perceived)


def test_prefix_retention_consumes_no_randomness():
    message = _message()
    params = _params(PrefixRetention(capacity=3))
    out = [
        perceive(message, params, np.random.default_rng(seed), np.random.default_rng(9))
        for seed in (0, 1, 2)
    ]
    assert out[0] == out[1] == out[2]


def test_noiseless_channel_preserves_symbol_contents():
    message = _message()
    params = _params(PrefixRetention(capacity=10), p=0.0)
    percept = perceive(
        message, params, np.random.default_rng(0), np.random.default_rng(1)
    )
    for symbol in message.symbols:
        assert percept.perceived[symbol.feature_index] == symbol


def test_certain_noise_shifts_level_but_never_sign():
    message = _message()
    params = _params(PrefixRetention(capacity=10), p=1.0)
    percept = perceive(
        message, params, np.random.default_rng(0), np.random.default_rng(1)
    )
    assert percept.corrupted_count == percept.retained_count == len(message.symbols)
    top = message.quant_levels - 1
    for symbol in message.symbols:
        heard = percept.perceived[symbol.feature_index]
        assert heard is not MISSING
        assert heard.sign == symbol.sign
        assert heard.level != symbol.level or symbol.level in (0, top)
        assert abs(heard.level - symbol.level) <= 1
        assert 0 <= heard.level <= top


def test_serial_decay_first_position_rate():
    # P(retain position 1) = rho
    rho = 0.6
    message = _message(values=(0.9,), style=Style.BRIEF)
    params = _params(SerialDecayRetention(rho=rho))
    rng = np.random.default_rng(42)
    kept = sum(
        perceive(message, params, rng, np.random.default_rng(0)).retained_count
        for _ in range(20_000)
    )
    assert kept / 20_000 == pytest.approx(rho, abs=0.01)


def test_serial_decay_third_position_rate():
    # P(retain position 3) = rho**3 = 0.778688 for rho = 0.92
    rho = 0.92
    message = _message()
    third = message.symbols[2].feature_index
    params = _params(SerialDecayRetention(rho=rho))
    rng = np.random.default_rng(7)
    noise = np.random.default_rng(0)
    hits = sum(
        perceive(message, params, rng, noise).perceived[third] is not MISSING
        for _ in range(20_000)
    )
    assert hits / 20_000 == pytest.approx(rho**3, abs=0.01)


def test_serial_decay_attrition_grows_with_position():
    message = _message()
    params = _params(SerialDecayRetention(rho=0.7))
    rng = np.random.default_rng(3)
    noise = np.random.default_rng(0)
    counts = np.zeros(len(message.symbols))
    for _ in range(20_000):
        percept = perceive(message, params, rng, noise)
        for pos, symbol in enumerate(message.symbols):
            if percept.perceived[symbol.feature_index] is not MISSING:
                counts[pos] += 1
    # later presentation positions survive strictly less often
    assert all(counts[i] > counts[i + 1] for i in range(len(counts) - 1))


def test_unknown_retention_policy_rejected():
    class Odd:
        pass

    message = _message()
    params = _params(PrefixRetention(capacity=3))
    object.__setattr__(params, "retention", Odd())
    with pytest.raises(TypeError):
        perceive(message, params, np.random.default_rng(0), np.random.default_rng(1))
