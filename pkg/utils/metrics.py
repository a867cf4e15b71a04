"""Prometheus metrics for classification runs and tower construction."""
from prometheus_client import Counter, Histogram

from config import config


# Classification metrics
decisions_total = Counter(
    'nccw_decisions_total',
    'Total number of conjugacy decisions',
    ['method', 'verdict']  # Labels: graph/spectrum, conjugate/not_conjugate
)

reduction_steps_total = Counter(
    'nccw_reduction_steps_total',
    'Total number of redundant indices eliminated'
)

isomorphism_search_duration_seconds = Histogram(
    'nccw_isomorphism_search_duration_seconds',
    'Time spent in twisted-graph isomorphism search',
    buckets=[0.001, 0.01, 0.1, 0.5, 1, 5, 10, 60]
)


# Tower metrics
stages_built_total = Counter(
    'nccw_stages_built_total',
    'Total number of tower stages built',
    ['flavor']  # Label: path or conn
)

stage_build_duration_seconds = Histogram(
    'nccw_stage_build_duration_seconds',
    'Stage construction time in seconds',
    ['flavor'],
    buckets=[0.01, 0.1, 0.5, 1, 5, 15, 60, 300]
)

stage_size_elements = Histogram(
    'nccw_stage_size_elements',
    'Number of Y elements per built stage',
    buckets=[10, 100, 1000, 10000, 100000, 1000000]
)

condition_failures_total = Counter(
    'nccw_condition_failures_total',
    'Total number of failed condition checks',
    ['condition']
)

path_lifts_total = Counter(
    'nccw_path_lifts_total',
    'Total number of lifted paths',
    ['status']  # Labels: ok, error
)


# Search budget metrics
search_budget_exhausted_total = Counter(
    'nccw_search_budget_exhausted_total',
    'Total number of bounded searches that ran out of budget',
    ['search']  # Labels: appbr_matrix, k33
)


def _enabled() -> bool:
    return bool(config.get('metrics.enable_prometheus', True))


def record_decision(method: str, verdict: str) -> None:
    if not _enabled():
        return
    decisions_total.labels(method=method, verdict=verdict).inc()


def record_stage(flavor: str, seconds: float, size: int) -> None:
    if not _enabled():
        return
    stages_built_total.labels(flavor=flavor).inc()
    stage_build_duration_seconds.labels(flavor=flavor).observe(seconds)
    stage_size_elements.observe(size)


def record_condition_failure(condition: str) -> None:
    if not _enabled():
        return
    condition_failures_total.labels(condition=condition).inc()


def record_lift(ok: bool) -> None:
    if not _enabled():
        return
    path_lifts_total.labels(status="ok" if ok else "error").inc()


def record_budget_exhausted(search: str) -> None:
    if not _enabled():
        return
    search_budget_exhausted_total.labels(search=search).inc()


def record_reduction_step() -> None:
    if not _enabled():
        return
    reduction_steps_total.inc()


def record_search_duration(seconds: float) -> None:
    if not _enabled():
        return
    isomorphism_search_duration_seconds.observe(seconds)
