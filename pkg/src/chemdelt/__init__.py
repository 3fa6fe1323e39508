"""chemdelt: a desk-scale semantic e-learning engine.

Course XML is ingested into an indexed triple store, chemical entities are
linked to ontology concepts, and learners get faceted search plus dynamic,
prerequisite-respecting learning trajectories generated from their session
history.
"""

__version__ = "0.1.0"
