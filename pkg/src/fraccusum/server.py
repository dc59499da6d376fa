"""fraccusum MCP Server."""

from mcp.server.fastmcp import FastMCP

from fraccusum.tools.detector import register_detector_tools
from fraccusum.tools.experiments import register_experiment_tools
from fraccusum.tools.instructions import register_instruction_tools
from fraccusum.tools.likelihood import register_likelihood_tools

# Create MCP server
mcp = FastMCP("fraccusum")

# Register all tools
register_detector_tools(mcp)
register_likelihood_tools(mcp)
register_experiment_tools(mcp)
register_instruction_tools(mcp)


def main() -> None:
    """Run the MCP server."""
    mcp.run()


if __name__ == "__main__":
    main()
