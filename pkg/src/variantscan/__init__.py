"""Process variant analysis along continuous case dimensions.

Rank cases by an indicator (duration, risk score, ...), bucket them, slide
left/right windows and compare their variant distributions with the earth
mover's distance, then segment at the peaks and merge similar segments.
"""

from .change_detection import Bucketing, LdistSeries, ldist_series, make_buckets, multi_window_analysis
from .emd import DistanceCache, EmdResult, emd, emd_oracle, levenshtein_norm
from .event_log import (
    CsvConfig,
    Event,
    EventLog,
    LogFormatError,
    Trace,
    control_flow,
    parse_csv,
    parse_xes,
    read_log,
    stochastic_language,
    write_csv,
)
from .indicators import IndicatorSpec, RankedLog, evaluate_indicator, rank_log
from .pipeline import AnalysisConfig, AnalysisError, AnalysisReport, analyze_log, run_analysis
from .segmentation import (
    ChangePointSet,
    ComparisonMatrix,
    MergeResult,
    Segment,
    compare_segments,
    cut_segments,
    detect_change_points,
    merge_segments,
)
from .synthgen import ClaimGenConfig, StepGenConfig, generate_claim_log, generate_step_log

__version__ = "0.1.0"
