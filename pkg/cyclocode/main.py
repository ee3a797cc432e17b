import sys
import logfire
from pydantic import ValidationError as SchemaError
from cyclocode.api.commands import dispatch, parse_config
from cyclocode.core.errors import PrecisionLossError, ValidationError
from cyclocode.core.logging import setup_logfire

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PRECISION = 2


def main(argv=None, stream=None) -> int:
    """Run one command; 0 on success, 1 on rejected input, 2 on an FFT precision breach"""
    setup_logfire()
    try:
        config = parse_config(argv)
        logfire.info("Command starting", command=config.command)
        return dispatch(config, stream)
    except (ValidationError, SchemaError) as e:
        logfire.error("Command rejected input", error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except PrecisionLossError as e:
        logfire.error("Command stopped on precision loss", deviation=e.deviation, threshold=e.threshold)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECISION


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
