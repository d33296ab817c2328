"""
Tests package for the tight-POVM toolkit

One test module per service (qstate, povm, entanglement, nested, catalog,
optimizer, tomography) plus the CLI and the config/schema layer.
- helpers/: brute-force oracles used to cross-check the services
"""
