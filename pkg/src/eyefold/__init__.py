"""Eyelid-fold-consistent mesh processing toolkit.

Template-based eyelid interpolation and crease sharpening for retopology,
a quantitative hoodedness metric with error and diversity statistics, and
an annotation service with a browser UI.
"""

from .annotations import AnnotationRecord, AnnotationStore, ScanEntry, load_scan_manifest
from .blendshape import (
    BlendshapeDelta,
    SharpenParams,
    TemplateSet,
    apply_delta,
    compute_delta,
    crease_adjacent_vertices,
    generate_candidates,
    load_template_set,
    mirror_augment_dataset,
    path_interpolate,
    regional_interpolate,
    sharpen_crease,
)
from .errors import (
    CountMismatch,
    DegenerateCurve,
    DegenerateData,
    DegenerateFrame,
    DomainError,
    EmptyInput,
    EyefoldError,
    IndexOutOfRange,
    InvariantViolation,
    MalformedLine,
    MissingMetadata,
    NoAnnotation,
    NonTriangleFace,
    SampleMismatch,
    SchemaError,
    TopologyError,
    UnknownScan,
)
from .estimators import (
    CreaseSharpener,
    DiagonalGmm,
    HoodednessProfiler,
    MirrorAugmenter,
    TemplateInterpolator,
)
from .mesh import (
    Mesh,
    TopologyDescriptor,
    Violation,
    extract_loop_curve,
    load_obj,
    load_topology,
    mirror_mesh,
    save_obj,
    save_topology,
    validate_topology,
)
from .metric import (
    DEFAULT_PROFILE_SAMPLES,
    ErrorCdf,
    GroupErrorRow,
    HoodednessProfile,
    ShapeError,
    error_cdf,
    group_errors,
    hoodedness_profile,
    profile_from_projected,
    project_frontal,
    projected_loop_curves,
    resample_by_arclength,
    shape_error,
)
from .pipeline import PipelineConfig, annotated_retopo, run_batch_pipeline
from .stats import (
    DiversityReport,
    Gmm,
    ProfileStats,
    diversity_report,
    gmm_fit,
    gmm_sample,
    load_gmm,
    profile_stats,
    profiles_matrix,
    save_gmm,
)
from .templates import gen_templates, synthesize_template_set, synthesize_topology

__version__ = "0.1.0"
