"""
Random-code experiments over one or more block lengths.
"""

from typing import Any, Dict, List, Tuple

from decoupling_lab import config
from decoupling_lab.coding.experiment import (
    RECORD_COLUMNS,
    CodeExperimentConfig,
    CodeExperimentRecord,
    run_code_experiment,
    summarize,
)
from decoupling_lab.experiment_config import CodeConfig

CODE_COLUMNS = ["n", "R_dim", "rate"] + RECORD_COLUMNS


class CodeService:
    def __init__(self, logger):
        self.logger = logger
        self.logger.info("Code service initialized")

    def evaluate(self, cfg: CodeConfig, threads: int = None) -> List[Tuple[CodeExperimentConfig, List[CodeExperimentRecord]]]:
        results = []
        for n in cfg.n:
            experiment = CodeExperimentConfig(
                channel=cfg.channel,
                n=n,
                r_dim=cfg.r_dim,
                trials=cfg.trials,
                phi=cfg.phi,
                delta=cfg.delta,
                seed=cfg.seed,
                subspace_mode=cfg.subspace_mode,
                threads=threads,
            )
            self.logger.info(f"Running {cfg.trials} codes at n={n}, Q={experiment.rate:.4f}")
            results.append((experiment, run_code_experiment(experiment)))
        return results

    def run(self, cfg: CodeConfig, writer, threads: int = None, fmt: str = 'csv') -> bool:
        results = self.evaluate(cfg, threads)
        rows: List[Dict[str, Any]] = [
            {"n": experiment.n, "R_dim": experiment.r_dim, "rate": experiment.rate, **record.to_row()}
            for experiment, records in results
            for record in records
        ]
        if fmt == 'csv':
            writer.write_csv("code.csv", CODE_COLUMNS, rows)
        else:
            writer.write_json("code.json", {"rows": rows})
        blocks = [self._block(experiment, records) for experiment, records in results]
        passed = all(block["within_oneshot_bound"] for block in blocks)
        writer.write_json("summary.json", {
            "command": "code",
            "channel": cfg.channel.name,
            "subspace_mode": cfg.subspace_mode.value,
            "seed": cfg.seed,
            "blocks": blocks,
            "all_within_bound": passed,
        })
        return passed

    def _block(self, experiment: CodeExperimentConfig, records: List[CodeExperimentRecord]) -> Dict[str, Any]:
        """Block summary with the mean distance checked against the one-shot bound."""
        summary = summarize(records)
        limit = summary["oneshot_bound"] + config.SIGMA_BAND * summary["stderr_decoupling_distance"]
        within = summary["mean_decoupling_distance"] <= limit + config.TOLERANCE
        if not within:
            self.logger.warning(
                f"n={experiment.n}: mean decoupling distance {summary['mean_decoupling_distance']:.6g} "
                f"exceeds the one-shot bound {summary['oneshot_bound']:.6g}"
            )
        return {"n": experiment.n, "rate": experiment.rate, **summary, "within_oneshot_bound": within}
