"""steerbench: a benchmark for sequential well-steering decisions.

Two simulated reservoir settings, a Bayesian layer for tracking boundary
and fault uncertainty, and four decision policies (myopic greedy, dynamic
programming on a discretized belief state, tabular Q-learning, and a DQN
trained with hand-written backprop) under a seeded, paired evaluation
protocol.
"""

__version__ = "0.1.0"
