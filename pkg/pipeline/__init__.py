"""
Command-line pipeline
Gram computation, training, prediction, evaluation, tuning and self-test
"""
