import sys
from typing import Sequence

from loguru import logger
from pydantic import ValidationError as PydanticValidationError

from lorenz_qubit.cli import parse_cli
from lorenz_qubit.commands import run
from lorenz_qubit.errors import LorenzQubitError, UsageError
from lorenz_qubit.settings import Settings

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_IO = 3


def main(argv: Sequence[str] | None = None) -> int:
    settings = Settings()

    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if settings.DEBUG else "INFO")
    logger.info(settings)

    try:
        config = parse_cli(argv, settings)
    except SystemExit as e:
        # --help and --version
        return e.code if isinstance(e.code, int) else EXIT_OK
    except UsageError as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO

    logger.info(f"Running {config.command} with the {config.generator.model} model")

    try:
        run(config, settings)
    except (UsageError, PydanticValidationError) as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO
    except LorenzQubitError as e:
        logger.error(f"Error: {e}")
        return EXIT_RUNTIME

    logger.info(f"{config.command} finished")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
