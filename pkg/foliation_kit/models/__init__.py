# ============================================================
# foliation_kit/models/__init__.py — Makes models a Python package
# ============================================================
