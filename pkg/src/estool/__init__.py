"""Event-stream dataset toolkit.

Converts static RGB images into sparse event streams with a sliding-window
difference generator, reconstructs gray images from the streams, measures
dataset quality (event rates, 2-D entropy), and estimates the FP32
operand and energy cost of CNN/SNN consumers.
"""

__version__ = "0.1.0"

from .analysis import (
    EntropyResult,
    EventRateStats,
    SweepCurve,
    entropy_2d,
    entropy_vs_steps,
    event_rate,
    event_rate_histogram,
    rate_stats,
    threshold_sweep,
)
from .color import read_ppm, resize_nearest, rgb_to_gray, rgb_to_hsv, value_map, zero_pad
from .cost import EnergyModel, LayerSpec, OpCount, count_layer, count_network, energy
from .generator import (
    ConversionConfig,
    EventStream,
    diff_events,
    generate_events,
    valid_region_filter,
)
from .reconstruct import center_crop, edge_integral, naive_sum, to_gray_levels
from .snn import (
    ContinuousLifParams,
    DiscreteCellConfig,
    closed_form_u,
    liaf_step,
    lif_step,
    rate_decode,
)
from .storage import from_event_frames, read_stream, to_event_frames, write_stream
from .trajectory import (
    Trajectory,
    displacement,
    make_trajectory,
    odg_trajectory,
    rcls_trajectory,
    saccade_trajectory,
)
