"""Prompt template loading and placeholder rendering.

Templates are plain text files with {name} placeholders. The packaged
defaults reproduce the five generation prompts this toolkit is built
around; a directory of same-named .txt files can override them. Rendering
substitutes only the values provided, leaving other placeholders (the
trailing output-slot markers) untouched.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .errors import ConfigError

TEMPLATE_IDS = (
    "spatial_init",
    "abstract",
    "interaction_knowledge",
    "interaction_graph",
    "qa_generation",
)

# Placeholders each template consumes as input when rendered by the pipeline.
TEMPLATE_INPUTS = {
    "spatial_init": ("image",),
    "abstract": ("spatial_scene_graph", "image"),
    "interaction_knowledge": ("abstract_graph", "image"),
    "interaction_graph": ("interaction_knowledge", "image"),
    "qa_generation": ("interaction_graph", "image"),
}


def load_template(template_id: str, templates_dir: str | Path | None = None) -> str:
    if template_id not in TEMPLATE_IDS:
        raise ConfigError(f"unknown template id {template_id!r}")
    if templates_dir is not None:
        path = Path(templates_dir) / f"{template_id}.txt"
        if not path.is_file():
            raise ConfigError(f"template file not found: {path}")
        return path.read_text(encoding="utf-8")
    ref = resources.files("interscene").joinpath("templates", f"{template_id}.txt")
    return ref.read_text(encoding="utf-8")


def render(template_text: str, **values) -> str:
    """Substitute {name} slots for the values given; others are left as-is."""
    out = template_text
    for name, value in values.items():
        out = out.replace("{" + name + "}", str(value))
    return out


def render_template(
    template_id: str, templates_dir: str | Path | None = None, **values
) -> str:
    return render(load_template(template_id, templates_dir), **values)


def serialize_triples(graph, kind=None) -> str:
    """Render a graph's edges as the bullet triple lines the prompts use."""
    lines = []
    for edge in graph.edges:
        if kind is not None and edge.kind != kind:
            continue
        s = graph.display_name(edge.subject)
        o = graph.display_name(edge.object)
        lines.append(f"- <{s}, {edge.predicate}, {o}>")
    return "\n".join(sorted(lines))
