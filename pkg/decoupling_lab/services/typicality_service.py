"""
Typicality reports for the flattened codes of a channel.
"""

from typing import List

from decoupling_lab.experiment_config import TypicalityConfig
from decoupling_lab.typicality.flattening import TypicalityReport, channel_state, flatten_code, verify_typ_bounds

BOUND_COLUMNS = ["n", "name", "lhs", "rhs", "pass", "slack", "required"]


class TypicalityService:
    def __init__(self, logger):
        self.logger = logger
        self.logger.info("Typicality service initialized")

    def evaluate(self, cfg: TypicalityConfig) -> List[TypicalityReport]:
        state = channel_state(cfg.channel, cfg.phi)
        reports = []
        for n in cfg.n:
            report = verify_typ_bounds(flatten_code(state, n, cfg.delta))
            status = "pass" if report.passed else f"FAIL {[c.name for c in report.failures]}"
            self.logger.info(f"{cfg.channel.name} n={n} δ={cfg.delta}: ε={report.epsilon:.4g}, "
                             f"ι/n={report.iota / n:.4f}, {status}")
            reports.append(report)
        return reports

    def run(self, cfg: TypicalityConfig, writer, threads: int = None, fmt: str = 'json') -> bool:
        """Write the reports; False when any required check failed."""
        reports = self.evaluate(cfg)
        if fmt == 'csv':
            writer.write_csv("typicality.csv", BOUND_COLUMNS, [
                {"n": report.n, **check.to_dict()} for report in reports for check in report.bounds
            ])
        writer.write_json("typicality.json", {
            "command": "typicality",
            "channel": cfg.channel.name,
            "reports": [report.to_dict() for report in reports],
        })
        return all(report.passed for report in reports)
