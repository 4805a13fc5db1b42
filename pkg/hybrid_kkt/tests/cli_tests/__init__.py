"""
命令行与 MCP 工具测试模块初始化文件
"""
