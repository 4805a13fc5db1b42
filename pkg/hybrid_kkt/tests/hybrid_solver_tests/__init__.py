"""
混合求解器测试模块初始化文件
"""
