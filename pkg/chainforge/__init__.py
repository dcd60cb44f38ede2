"""
@file: __init__.py
@time: 2026/10/17 10:30
@desc: chainforge - symmetric spin chain extensions and encoded state transfer
"""
