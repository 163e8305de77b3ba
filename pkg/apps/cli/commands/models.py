from lib.estimators import list_observables
from lib.experiment import list_tasks
from lib.model.builtin import list_models

DEFINITION = {
    "name": "list",
    "description": "List the built-in models, tasks and observables",
    "arguments": [],
}


def main() -> int:
    """Main entry point for the list command."""
    print("Models:")
    for info in list_models():
        defaults = ", ".join(f"{name}={value}" for name, value in info.defaults().items())
        print(f"  {info.name:<16} {info.description}")
        print(f"  {'':<16} ({defaults})")

    print("\nTasks:")
    for definition in list_tasks():
        print(f"  {definition.name:<24} {definition.description}")

    print("\nObservables:")
    for name in list_observables():
        print(f"  {name}")
    return 0
