"""
指标与预言机测试模块初始化文件
"""
