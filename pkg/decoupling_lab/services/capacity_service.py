"""
Coherent-information lower bounds, single-letter and multi-copy.
"""

from typing import List

import numpy as np

from decoupling_lab.coding.capacity import CapacityResult, maximize_coherent_information, multicopy_lower_bound
from decoupling_lab.experiment_config import CapacityConfig
from decoupling_lab.sampling.seeded_source import SeededSource
from decoupling_lab.utils.error_handler import InvariantError

CAPACITY_COLUMNS = ["channel", "n", "coherent_information", "restarts", "evaluations"]


class CapacityService:
    def __init__(self, logger):
        self.logger = logger
        self.logger.info("Capacity service initialized")

    def evaluate(self, cfg: CapacityConfig, threads: int = None) -> List[CapacityResult]:
        """Results in the order of ``cfg.copies``.

        Raises:
            InvariantError: If a best-so-far history ever decreases
        """
        master = SeededSource(cfg.seed)
        single = maximize_coherent_information(cfg.channel, cfg.restarts, cfg.iterations, master.derive(1),
                                               threads=threads)
        results = []
        for n in cfg.copies:
            result = multicopy_lower_bound(cfg.channel, n, cfg.restarts, cfg.iterations, master.derive(n),
                                           single=single, threads=threads)
            if np.any(np.diff(result.history) < 0):
                raise InvariantError(f"Best-so-far coherent information decreased for n={n}")
            self.logger.info(f"{cfg.channel.name} n={n}: I_c lower bound {result.value:.10f}")
            results.append(result)
        return results

    def run(self, cfg: CapacityConfig, writer, threads: int = None, fmt: str = 'json') -> bool:
        results = self.evaluate(cfg, threads)
        if fmt == 'csv':
            writer.write_csv("capacity.csv", CAPACITY_COLUMNS, [
                {
                    "channel": r.channel_name,
                    "n": r.n,
                    "coherent_information": r.value,
                    "restarts": r.restarts,
                    "evaluations": r.evaluations,
                }
                for r in results
            ])
        writer.write_json("capacity.json", {
            "command": "capacity",
            "seed": cfg.seed,
            "results": [r.to_dict() for r in results],
        })
        return True
