# ============================================================
# foliation_kit/algebra — Exact polynomial and form arithmetic
# ============================================================
