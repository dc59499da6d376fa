"""Instruction tools for MCP server.

Returns workflow instructions that the agent should follow
when running experiments.
"""

from mcp.server.fastmcp import FastMCP

from fraccusum.tools.instructions.experiment_workflow import EXPERIMENT_WORKFLOW_INSTRUCTIONS
from fraccusum.tools.tool_names import TOOL_GET_EXPERIMENT_WORKFLOW_INSTRUCTIONS


def register_instruction_tools(mcp: FastMCP) -> None:
    """Register instruction tools that return workflow guides for the agent."""

    @mcp.tool(name=TOOL_GET_EXPERIMENT_WORKFLOW_INSTRUCTIONS, description="""\
      Get step-by-step instructions for checking the detector against its
      closed-form operating characteristics.

      Call this tool before running Monte Carlo experiments.

      Returns a detailed algorithm covering threshold choice, grid sizing,
      running both regimes and reading the z-scores.""")
    async def get_experiment_workflow_instructions() -> str:
        return EXPERIMENT_WORKFLOW_INSTRUCTIONS
