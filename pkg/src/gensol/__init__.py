"""Verification and conversion of generalized solution concepts
(energy-variational, dissipative weak, measure-valued) for fluid
conservation laws on discretized domains."""

__version__ = "0.1.0"
