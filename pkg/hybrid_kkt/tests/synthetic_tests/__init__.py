"""
合成序列生成器测试模块初始化文件
"""
