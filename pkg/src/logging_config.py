import logging
import logging.handlers
import os
import sys
from pathlib import Path
from datetime import datetime, timezone

# -------- LOG DIRECTORY --------
LOG_DIR = Path(os.getenv("LOG_DIR", "logs"))
LOG_FILE = LOG_DIR / "singpoincare.log"
LOG_TO_FILE = os.getenv("LOG_TO_FILE", "0").lower() in ("1", "true", "yes")

# Default log level based on .env
DEFAULT_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()


# -------- FORMATTER WITH UTC TIMESTAMP --------
class UTCFormatter(logging.Formatter):

    def formatTime(self, record, datefmt=None):
        dt = datetime.fromtimestamp(record.created, tz=timezone.utc)
        if datefmt:
            return dt.strftime(datefmt)
        return dt.isoformat()


FORMAT = "%(asctime)sZ %(levelname)s [%(name)s] %(message)s"
DATEFMT = "%Y-%m-%dT%H:%M:%S.%f"


# -------- SETUP LOGGING --------
def setup_logging(level: str | None = None):
    root = logging.getLogger()

    # Prevent double initialization
    if getattr(root, "_singpoincare_configured", False):
        return

    level = (level or DEFAULT_LEVEL).upper()
    root.setLevel(level)

    # ----- Console Handler (stderr, stdout carries command output) -----
    ch = logging.StreamHandler(sys.stderr)
    ch.setLevel(level)
    ch.setFormatter(UTCFormatter(FORMAT, datefmt=DATEFMT))
    root.addHandler(ch)

    # ----- Rotating File Handler -----
    if LOG_TO_FILE:
        LOG_DIR.mkdir(parents=True, exist_ok=True)
        fh = logging.handlers.RotatingFileHandler(
            filename=str(LOG_FILE),
            maxBytes=10 * 1024 * 1024,  # 10 MB
            backupCount=7,
            encoding="utf-8"
        )
        fh.setLevel(level)
        fh.setFormatter(UTCFormatter(FORMAT, datefmt=DATEFMT))
        root.addHandler(fh)

    root._singpoincare_configured = True
    root.debug("Logging initialized. Level=%s, file=%s", level, LOG_FILE if LOG_TO_FILE else "-")
