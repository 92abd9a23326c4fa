import numpy as np
import pytest

from mmwave_bitalloc.channel import (
    ArrayGeometry,
    ChannelConfig,
    channel_from_spectrum,
    generate_channel,
)


@pytest.fixture(scope="session")
def small_channel():
    """8x6 clustered channel with 3 retained streams."""
    config = ChannelConfig(
        geometry=ArrayGeometry(num_tx_antennas=6, num_rx_antennas=8),
        num_streams=3,
        num_clusters=4,
        num_rays_per_cluster=5,
        dominant_boost_factor=2.0,
        rng_seed=42,
    )
    return generate_channel(config)


@pytest.fixture(scope="session")
def preset8_channel():
    from mmwave_bitalloc.config import PRESET_CHANNEL_8

    return generate_channel(PRESET_CHANNEL_8)


@pytest.fixture
def spectrum_channel():
    """Channel with the exact spectrum [2, 1] used by several worked examples."""
    geometry = ArrayGeometry(num_tx_antennas=4, num_rx_antennas=4)
    return channel_from_spectrum(np.array([2.0, 1.0]), geometry, rng_seed=11)
