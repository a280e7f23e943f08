# Entailment engine package
