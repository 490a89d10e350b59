import json
from typing import Optional

from pyvis.network import Network

from models.phase_space import PhaseSpace

PERIODIC_COLOR = "#ff4b4b"
GOE_COLOR = "#9aa0a6"
TRANSIENT_COLOR = "#31333F"


def render_json(payload) -> str:
    return json.dumps(payload, indent=2)


def render_phase_space_text(ps: PhaseSpace) -> str:
    return ps.to_dataframe().to_string(index=False)


def render_phase_space_html(ps: PhaseSpace) -> str:
    """Standalone HTML page showing the phase space; cycle states in red, GoE states grey."""
    net = Network(height="700px", width="100%", directed=True, bgcolor="#ffffff", font_color="black")
    options = {
        "physics": {"enabled": True, "stabilization": {"iterations": 200}},
        "nodes": {"font": {"size": 12}, "shape": "box"},
        "edges": {"arrows": {"to": {"enabled": True}}, "smooth": False},
    }
    net.set_options(json.dumps(options))

    periodic = ps.periodic_mask()
    for b in range(ps.size):
        label = str(ps.state(b))
        if periodic[b]:
            color = PERIODIC_COLOR
        elif ps.in_degree[b] == 0:
            color = GOE_COLOR
        else:
            color = TRANSIENT_COLOR
        title = f"{label}<br>in-degree: {int(ps.in_degree[b])}<br>verdict: {ps.verdict(b)}"
        net.add_node(label, label=label, title=title, color=color)
    for b in range(ps.size):
        net.add_edge(str(ps.state(b)), str(ps.state(ps.successor[b])))
    return net.generate_html()


def write_output(text: str, path: Optional[str] = None, stream=None):
    """Write to `path` when given, otherwise to `stream`."""
    if path is not None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text if text.endswith("\n") else text + "\n")
        return
    stream.write(text if text.endswith("\n") else text + "\n")
