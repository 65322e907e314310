"""Streaming multi-agent belief propagation over news streams, with a
single-agent temporal baseline, a synthetic workload generator and an
evaluation harness."""

__version__ = "0.1.0"
