import logfire
from cyclocode import __version__
from cyclocode.core.config import settings


def setup_logfire(console: bool | None = None):
    """Configure Logfire once per process"""
    logfire.configure(
        service_name=settings.SERVICE_NAME,
        service_version=__version__,
        token=settings.LOGFIRE_TOKEN,
        send_to_logfire=bool(settings.LOGFIRE_TOKEN),
        environment=settings.ENV,
        console=None if (settings.LOGFIRE_CONSOLE if console is None else console) else False,
    )

    if settings.LOGFIRE_TOKEN:
        logfire.info("Logfire configured with cloud integration")
    else:
        logfire.debug("Logfire running in local mode")
