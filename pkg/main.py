"""
Lexical Textual Entailment command line
Decides whether a text T entails a hypothesis H with the modified resolution
method (MRM) and with lexical paths for entailment (LPE).
"""
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from cli.commands import EXIT_ERROR, run_command
from cli.services.logging_config import configure_root_logging
from cli.services.settings import get_settings


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        settings = get_settings()
    except ValidationError as e:
        problems = "; ".join(f"ENTAIL_{'.'.join(str(p) for p in err['loc']).upper()}: {err['msg']}" for err in e.errors())
        print(f"error: invalid environment: {problems}", file=sys.stderr)
        return EXIT_ERROR

    configure_root_logging(settings.log_level)
    status, output = run_command(sys.argv[1:] if argv is None else argv, settings=settings)
    if output:
        stream = sys.stderr if status == EXIT_ERROR else sys.stdout
        print(output, file=stream)
    return status


if __name__ == "__main__":
    sys.exit(main())
