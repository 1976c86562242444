"""
Brute-force any-gram kernels
Explicit n-gram enumeration used to check the dynamic programs
"""
