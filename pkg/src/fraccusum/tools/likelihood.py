"""Polynomial-drift likelihood tools for MCP server."""

from mcp.server.fastmcp import FastMCP
from pydantic import BaseModel

from fraccusum.engine.likelihood import energy_growth, poly_coefficients
from fraccusum.tools.tool_names import TOOL_GET_ENERGY_GROWTH, TOOL_GET_POLY_COEFFICIENTS


class PolyCoefficientsResponse(BaseModel):
    """d and v for the drift t^alpha."""
    hurst: float
    alpha: float
    d: float
    v: float


class EnergyGrowthResponse(BaseModel):
    """<u>_t for the drift theta * t^alpha."""
    hurst: float
    theta: float
    alpha: float
    t: float
    energy: float


def register_likelihood_tools(mcp: FastMCP) -> None:
    """Register likelihood tools."""

    @mcp.tool(name=TOOL_GET_POLY_COEFFICIENTS, description="""\
    Get the closed-form coefficients of the polynomial drift t^alpha.

    Q_t = d * t^alpha, and <u>_t = v * t^(2 - 2H + 2 alpha).

    Args:
        hurst: Hurst index in [0.01, 0.99]
        alpha: Drift exponent; 3/2 - H + alpha and 3 - 2H + alpha must be positive
    """)
    async def get_poly_coefficients(hurst: float, alpha: float) -> PolyCoefficientsResponse | dict:
        try:
            coefficients = poly_coefficients(hurst, alpha)
        except ValueError as e:
            return {"error": str(e)}
        return PolyCoefficientsResponse(hurst=hurst, alpha=alpha, d=coefficients.d,
                                        v=coefficients.v)

    @mcp.tool(name=TOOL_GET_ENERGY_GROWTH, description="""\
    Get <u>_t = theta^2 v t^(2 - 2H + 2 alpha) for the drift theta * t^alpha.

    Requires alpha > H - 1; below it the accumulated information stays
    bounded and the detector is not optimal.

    Args:
        hurst: Hurst index in [0.01, 0.99]
        theta: Drift amplitude
        alpha: Drift exponent
        t: Time, >= 0
    """)
    async def get_energy_growth(
        hurst: float,
        theta: float,
        alpha: float,
        t: float,
    ) -> EnergyGrowthResponse | dict:
        try:
            energy = energy_growth(hurst, theta, alpha, t)
        except ValueError as e:
            return {"error": str(e)}
        return EnergyGrowthResponse(hurst=hurst, theta=theta, alpha=alpha, t=t, energy=energy)
