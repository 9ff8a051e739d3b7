"""Video-to-event conversion with an analogue DVS pixel model."""

__version__ = "0.1.0"

from adv2e.errors import (Adv2eError, BadMagic, BoundsError, DimensionMismatch, GeometryMismatch,
                          InvalidConfig, InvalidFactor, InvalidWindow, ManifestError, MissingFile,
                          NonMonotonicTimestamps, ParseError, TruncatedFile)
from adv2e.eventio import (read_events, read_events_binary, read_events_text, render_accumulation,
                           write_events, write_events_binary, write_events_text)
from adv2e.ingestion import FrameSource, interpolate_linear, load_sequence, write_sequence
from adv2e.metrics import StatsReport, VoxelGrid, build_voxel_grid, stream_stats, voxel_distance
from adv2e.pixel import (continuity_sample, cutoff, filter_step, generate_events, inject_noise,
                         log_transform, simulate, simulate_detailed)
from adv2e.types import (EVENT_DTYPE, I_MAX, Event, EventStream, Frame, PixelState, SimConfig,
                         validate_config)
