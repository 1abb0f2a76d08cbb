"""Speaker diarization scoring toolkit.

Time-weighted DER, utterance-level conversational DER (CDER), RTTM I/O,
brute-force verification oracles, and a synthetic-error simulator.
"""
from .cder import CderConfig, CderReport, UndefinedMetric, compute_cder
from .der import DerConfig, DerReport, compute_der
from .mapping import SpeakerMap, match_speakers
from .rttm_io import parse_rttm, write_rttm
from .timeline import Annotation, Segment, Turn

__all__ = [
    "Annotation",
    "Segment",
    "Turn",
    "SpeakerMap",
    "match_speakers",
    "DerConfig",
    "DerReport",
    "compute_der",
    "CderConfig",
    "CderReport",
    "UndefinedMetric",
    "compute_cder",
    "parse_rttm",
    "write_rttm",
]

__version__ = "0.1.0"
