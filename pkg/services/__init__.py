# Services module for group, character and convolution-algebra computations
