# ============================================================
# foliation_kit — Exact algebra for foliations with a rational
# first integral f = P^q / Q^p
# ============================================================
# Package layout:
#   algebra/     polynomials, forms, Gröbner engine, linear solves
#   foliation    the datum f, α₀, ω₀, genericity, Milnor bookkeeping
#   brieskorn    M(*D), the H_f basis, decompositions, certificates
#   pullback     morphisms, tangent vectors, rank accounting
#   periods      critical values, fiber loops, Melnikov functions
#   engine/app   batch front-end
# ============================================================

__version__ = '1.0.0'
