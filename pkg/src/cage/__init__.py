"""Two-stage educational diagram pipeline and evaluation toolkit.

Stage 1 turns a diagram prompt into executable rendering code via a
pluggable LLM backend, executes it in a sandbox, and repairs failures in a
verification loop. Stage 2 extracts an edge map from the programmatic
rendering and hands it to a pluggable diffusion backend as a structural
constraint, then recomposites the original label regions so text survives
stylization byte-for-byte. The package also ships the full metric suite
(label exact-match, character error rate, Frechet distance, Krippendorff's
alpha, pair verification, cost model), a run harness with CLI, and an HTTP
review service for curating programmatic/stylized diagram pairs.
"""

__version__ = "0.1.0"
