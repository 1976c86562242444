"""
Any-gram kernel toolkit
Bag-of-all-orders n-gram kernels, Gram matrices and a precomputed-kernel SVM
"""

__version__ = '1.0.0'
