"""
稀疏核心测试模块初始化文件
"""
