"""
Bundled input documents, one per worked example.

``conehead_<k>`` is generated on demand: the unit interval with label k on
the facet at 0.
"""

import json
import re
from pathlib import Path

INPUTS_DIR = Path(__file__).resolve().parent

CONEHEAD = re.compile(r"^conehead_([1-9]\d*)$")


def bundled_names() -> list[str]:
    return sorted(path.stem for path in INPUTS_DIR.glob("*.json"))


def conehead(k: int) -> str:
    if k < 1:
        raise ValueError("The conehead label must be positive.")
    document = {
        "kind": "polytope",
        "name": f"conehead_{k}",
        "dim": 1,
        "facets": [
            {"normal": [1], "eta": "0", "label": k},
            {"normal": [-1], "eta": "1", "label": 1},
        ],
    }
    return json.dumps(document, indent=2) + "\n"


def load_bundled(name: str) -> str | None:
    """The text of a bundled input, or ``None`` if there is no such input."""
    match = CONEHEAD.match(name)
    if match:
        return conehead(int(match.group(1)))
    path = INPUTS_DIR / f"{name}.json"
    if path.is_file():
        return path.read_text(encoding="utf-8")
    return None
