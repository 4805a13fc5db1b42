"""
Hybrid KKT 求解器 MCP 服务器
直接注册工具组中的处理器, 仅支持 stdio 传输
"""

import logging
import sys
from pathlib import Path

from mcp.server.fastmcp import FastMCP

from hybrid_kkt.logging_config import configure_logging
from tools.mcp_tools_registry import registry

# 设置Windows控制台编码
if sys.platform == "win32":
    try:
        sys.stdout.reconfigure(encoding='utf-8')
        sys.stderr.reconfigure(encoding='utf-8')
    except Exception:
        pass

logger = logging.getLogger("tools.server")

GUIDE_PATH = Path(__file__).parent / "resources" / "KKT_SEQUENCE_FORMAT_GUIDE.md"

# 创建 FastMCP 服务器实例
mcp = FastMCP("hybrid-kkt")

# 自动发现并注册所有工具组
registry.auto_discover_groups()
for tool_name, tool_info in registry.get_all_tools().items():
    mcp.tool(name=tool_name, description=tool_info["description"])(tool_info["handler"])


@mcp.resource("guide://kkt-sequence-format")
def get_sequence_format_guide() -> str:
    """KKT sequence manifest and output format guide"""
    try:
        return GUIDE_PATH.read_text(encoding="utf-8")
    except FileNotFoundError:
        return f"格式指南文件未找到，请检查 {GUIDE_PATH} 是否存在。"


def main():
    """Start FastMCP server"""
    configure_logging()
    for group in registry.tool_groups:
        tools_in_group = [name for name, info in registry.tools.items() if info["group"] == group.name]
        logger.info("工具组 %s (%d tools)", group.name, len(tools_in_group))
    logger.info("总工具数: %d, 启动 stdio 服务器", len(registry.tools))

    # stdout 由 stdio 传输占用, 日志只写 stderr
    try:
        mcp.run(transport="stdio")
    except KeyboardInterrupt:
        logger.info("服务器已停止")


if __name__ == "__main__":
    main()
