"""One-bit symbol-level precoding and QAM constellation range design for massive MIMO downlink."""

__version__ = "0.1.0"

from .constellation import (  # noqa: E402
    QPSK_ALPHABET,
    QamConstellation,
    avg_neighbor_count,
    build_qam,
    quantize,
    quantize_array,
    symbol_power_moments,
)
from .channel import SeedSpec, channel_norms, generate_channel, sample_noise  # noqa: E402
from .precoding import (  # noqa: E402
    PrecodeOutcome,
    noiseless_receive,
    oracle_exhaustive,
    precode_inf_per_antenna,
    precode_inf_total,
    precode_one_bit_multi,
    precode_one_bit_single,
    precode_quantized_zf,
    precode_zf,
)
