"""
hybrid_kkt 测试包
"""
