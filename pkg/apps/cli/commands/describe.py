import sys

from lib.errors import UnknownTaskError
from lib.experiment import describe_task

DEFINITION = {
    "name": "describe",
    "description": "Describe a task and the parameters it accepts",
    "arguments": [
        {
            "name": "task",
            "type": str,
            "required": True,
            "help": "Task name, see the list command",
        },
    ],
}


def main(*, task: str) -> int:
    """Main entry point for the describe command."""
    try:
        print(describe_task(task))
    except UnknownTaskError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    return 0
