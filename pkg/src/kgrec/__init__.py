"""kgrec: knowledge-graph movie recommendation workbench.

Loads a movie knowledge graph with recommendable and descriptive entities,
runs the three-phase preference-elicitation interview (live over HTTP or
offline with simulated users), and evaluates a twelve-model recommender zoo
under leave-one-out HR@k / NDCG@k across add/substitute/remove experiments.
"""

__version__ = "0.1.0"
