# src/utils/log.py
import logging
from typing import Optional

import coloredlogs

_FMT = "%(asctime)s %(name)s %(levelname)s %(message)s"
_installed = False


def setup_logging(level: Optional[str] = None) -> None:
    """Install coloured stderr logging once per process."""
    global _installed
    from src.utils.config import get_settings

    lvl = (level or get_settings().log_level).upper()
    if _installed:
        logging.getLogger("src").setLevel(lvl)
        return
    coloredlogs.install(level=lvl, fmt=_FMT, logger=logging.getLogger("src"))
    _installed = True


class LogMixin:
    """`_log` helper shared by the engine classes; quiet unless debug is set."""

    debug: bool = False
    _log_prefix: str = ""

    def _log(self, *args) -> None:
        if self.debug:
            logger = logging.getLogger(type(self).__module__)
            prefix = self._log_prefix or f"[{type(self).__name__}]"
            logger.debug(" ".join([prefix, *(str(a) for a in args)]))
