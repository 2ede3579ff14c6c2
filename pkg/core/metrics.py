from prometheus_client import CollectorRegistry, Counter, Gauge, write_to_textfile

REGISTRY = CollectorRegistry()

TRIALS_COUNTER = Counter(
    'janken_trials_total',
    'Total number of simulated leader-selection trials',
    ['mode'],
    registry=REGISTRY,
)

ROUNDS_COUNTER = Counter(
    'janken_rounds_total',
    'Total number of effective rounds simulated (ties included)',
    registry=REGISTRY,
)

TABLES_COUNTER = Counter(
    'janken_exact_tables_total',
    'Total number of exact tables built',
    ['numeric_mode'],
    registry=REGISTRY,
)

HORIZON_GAUGE = Gauge(
    'janken_exact_horizon',
    'Horizon N of the most recently built exact table',
    registry=REGISTRY,
)


def write_metrics(path: str) -> None:
    """Dump the registry in Prometheus text format."""
    write_to_textfile(path, REGISTRY)
