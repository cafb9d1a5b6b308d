import logging
import json
from datetime import datetime
from typing import Any, Dict, List, Optional
from config import LOGS_DIR, LOG_LEVEL


class RunLogger:
    def __init__(self):
        self.setup_logging()

    def setup_logging(self):
        """Setup logging configuration"""
        log_file = LOGS_DIR / "repcomp.log"

        console = logging.StreamHandler()
        console.setLevel(getattr(logging, LOG_LEVEL.upper(), logging.WARNING))

        logging.basicConfig(
            level=logging.INFO,
            format='%(asctime)s - %(levelname)s - %(message)s',
            handlers=[
                logging.FileHandler(log_file),
                console
            ]
        )

        self.logger = logging.getLogger("repcomp")

    def _append_json(self, log_entry: Dict[str, Any]):
        json_log_file = LOGS_DIR / "runs.json"

        if json_log_file.exists():
            try:
                with open(json_log_file, 'r') as f:
                    logs = json.load(f)
            except json.JSONDecodeError:
                logs = []
        else:
            logs = []

        logs.append(log_entry)

        with open(json_log_file, 'w') as f:
            json.dump(logs, f, indent=2)

    def log_run(self, command: str, params: Dict[str, Any], outcome: str):
        """Log one CLI invocation with its parameters and outcome"""
        log_entry = {
            "timestamp": datetime.now().isoformat(),
            "event": "run",
            "command": command,
            "params": params,
            "outcome": outcome
        }

        self.logger.info(f"Run logged: {json.dumps(log_entry)}")
        self._append_json(log_entry)

    def log_classification(self, algebra: str, d: List[int], accepted: int,
                           rejected: int, undetermined: int, prime: int):
        """Log classifier statistics"""
        log_entry = {
            "timestamp": datetime.now().isoformat(),
            "event": "classification",
            "algebra": algebra,
            "d": list(d),
            "prime": prime,
            "accepted": accepted,
            "rejected": rejected,
            "undetermined": undetermined
        }

        self.logger.info(f"Classification completed: {json.dumps(log_entry)}")

    def log_error(self, error_message: str, context: str = "", prime: Optional[int] = None,
                  seed: Any = None, sequence: Optional[str] = None):
        """Log errors together with the prime, seed and sequence that produced them"""
        run = {"prime": prime, "seed": seed, "sequence": sequence}
        log_entry = {
            "timestamp": datetime.now().isoformat(),
            "event": "error",
            "error": error_message,
            "context": context,
            "run": {k: v for k, v in run.items() if v is not None}
        }

        self.logger.error(f"Error: {json.dumps(log_entry)}")
        self._append_json(log_entry)


# Global logger instance
run_logger = RunLogger()
