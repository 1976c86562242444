"""
Precomputed-kernel support vector classification
SMO dual solver, one-versus-one training and voting, model files
"""
