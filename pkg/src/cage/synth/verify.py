"""Verification of generated diagram code before it is accepted.

Three checks, run in order and all recorded even when an earlier one fails:

1. labels: every required label appears verbatim among the string arguments
   of the script's text-rendering calls.
2. executes: the script rendered to a raster without raising or timing out.
3. structure: the connectivity sidecar the renderer reports forms a single
   connected component, so no part of the diagram floats unattached.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

from cage.benchmark import DiagramPrompt
from cage.synth.artifacts import CodeArtifact, RenderOutput


@dataclass(frozen=True)
class StructureGraph:
    """Undirected diagram connectivity as reported by the renderer."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        known = set(self.nodes)
        for a, b in self.edges:
            if a not in known or b not in known:
                raise ValueError(f"edge ({a!r}, {b!r}) references unknown node")

    @classmethod
    def from_dict(cls, d: dict) -> "StructureGraph":
        return cls(nodes=tuple(d.get("nodes", ())),
                   edges=tuple((a, b) for a, b in d.get("edges", ())))

    def to_dict(self) -> dict:
        return {"nodes": list(self.nodes), "edges": [list(e) for e in self.edges]}


def check_structure(graph: StructureGraph) -> tuple[bool, list[list[str]]]:
    """BFS connectivity; returns (single component?, component node lists)."""
    if not graph.nodes:
        return True, []
    adjacency: dict[str, set[str]] = {n: set() for n in graph.nodes}
    for a, b in graph.edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    unseen = set(graph.nodes)
    components: list[list[str]] = []
    for start in graph.nodes:
        if start not in unseen:
            continue
        queue = deque([start])
        unseen.discard(start)
        component = [start]
        while queue:
            node = queue.popleft()
            for neighbor in sorted(adjacency[node]):
                if neighbor in unseen:
                    unseen.discard(neighbor)
                    component.append(neighbor)
                    queue.append(neighbor)
        components.append(sorted(component))
    return len(components) == 1, components


@dataclass(frozen=True)
class VerificationResult:
    """Outcome of the three checks for one attempt."""

    labels_ok: bool
    executes_ok: bool
    structure_ok: bool
    missing_labels: tuple[str, ...] = ()
    execution_error: str | None = None
    components: tuple[tuple[str, ...], ...] = ()

    @property
    def overall(self) -> bool:
        return self.labels_ok and self.executes_ok and self.structure_ok

    def failure_summary(self) -> str:
        """Human-readable feedback for the repair instruction."""
        parts: list[str] = []
        if not self.labels_ok:
            parts.append(f"missing labels: {', '.join(self.missing_labels)}")
        if not self.executes_ok:
            parts.append(f"execution failed: {self.execution_error or 'unknown error'}")
        if not self.structure_ok:
            parts.append(f"diagram splits into {len(self.components)} disconnected parts")
        return "; ".join(parts) if parts else "ok"

    def to_json(self) -> str:
        return json.dumps({
            "labels_ok": self.labels_ok,
            "executes_ok": self.executes_ok,
            "structure_ok": self.structure_ok,
            "overall": self.overall,
            "missing_labels": list(self.missing_labels),
            "execution_error": self.execution_error,
            "components": [list(c) for c in self.components],
        }, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, payload: str) -> "VerificationResult":
        d = json.loads(payload)
        return cls(labels_ok=d["labels_ok"], executes_ok=d["executes_ok"],
                   structure_ok=d["structure_ok"],
                   missing_labels=tuple(d.get("missing_labels", ())),
                   execution_error=d.get("execution_error"),
                   components=tuple(tuple(c) for c in d.get("components", ())))


def verify_code(artifact: CodeArtifact, prompt: DiagramPrompt,
                render_result: RenderOutput | None = None,
                structure: StructureGraph | None = None,
                execution_error: str | None = None) -> VerificationResult:
    """Run all three checks against one attempt.

    render_result is None when the script was never rendered (label check
    failed first, or rendering itself errored); in that case the execution
    check fails and carries the error text.
    """
    present = set(artifact.extracted_labels)
    missing = tuple(lab for lab in prompt.labels if lab not in present)
    labels_ok = not missing

    executes_ok = render_result is not None and execution_error is None

    structure_ok = False
    components: tuple[tuple[str, ...], ...] = ()
    if executes_ok:
        if structure is None:
            # No connectivity sidecar from the renderer: treat as connected
            # rather than failing scripts the renderer cannot introspect.
            structure_ok = True
        else:
            ok, comps = check_structure(structure)
            structure_ok = ok
            components = tuple(tuple(c) for c in comps)

    return VerificationResult(labels_ok=labels_ok, executes_ok=executes_ok,
                              structure_ok=structure_ok, missing_labels=missing,
                              execution_error=execution_error,
                              components=components)
