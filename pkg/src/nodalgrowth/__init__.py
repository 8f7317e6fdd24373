"""L^q growth exponents, nodal lengths and disk-lab checks for Laplace eigenfunctions."""
