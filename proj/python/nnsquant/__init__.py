"""Python access to the NNS quantification core."""

import json

from ._nns import (
    DEFAULT_LANDMARK,
    NUM_LANDMARKS,
    FilterKernel,
    NNSError,
    ShapeModel,
    design_bandpass,
    detect_cycles,
    estimate_affine_camera,
    load_shape_model,
    make_fixture_model,
    parse_shape_model,
    synthesize_shape,
)
from . import _nns

__all__ = [
    "DEFAULT_LANDMARK",
    "NUM_LANDMARKS",
    "FilterKernel",
    "NNSError",
    "ShapeModel",
    "analyze_signal",
    "design_bandpass",
    "detect_cycles",
    "estimate_affine_camera",
    "generate_signal",
    "load_shape_model",
    "make_fixture_model",
    "parse_shape_model",
    "run_pipeline",
    "score",
    "synthesize_shape",
]


def analyze_signal(samples, sample_rate, **params):
    """Cycles, bursts and summary rates of an already filtered signal, as a report dict."""
    return json.loads(_nns.analyze_signal_json(list(samples), sample_rate, **params))


def generate_signal(scenario=None):
    """Synthetic raw signal and its ground truth, both as dicts."""
    signal, truth = _nns.generate_signal_json(json.dumps(scenario or {}))
    return json.loads(signal), json.loads(truth)


def run_pipeline(trajectory, model, out_dir=None, **config):
    """Trajectory CSV + model JSON to report dict; writes artifacts when out_dir is given."""
    return json.loads(_nns.run_pipeline_json(str(trajectory), str(model), out_dir=out_dir, **config))


def score(report, truth, window_s=0.15):
    return json.loads(_nns.score_json(json.dumps(report), json.dumps(truth), window_s))
