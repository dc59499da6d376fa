"""CUSUM detector tools for MCP server."""

from mcp.server.fastmcp import FastMCP
from pydantic import BaseModel

from fraccusum.engine.cusum import (
    calibrate_threshold,
    lorden_characteristics_poly,
    theoretical_characteristics,
)
from fraccusum.tools.tool_names import (
    TOOL_CALIBRATE_THRESHOLD,
    TOOL_GET_LORDEN_CHARACTERISTICS,
    TOOL_GET_THEORETICAL_CHARACTERISTICS,
)


class ThresholdResponse(BaseModel):
    """Calibrated threshold with its K-L characteristics."""
    gamma: float
    c: float
    g: float
    h: float


class CharacteristicsResponse(BaseModel):
    """K-L detection and false-alarm divergences of a threshold."""
    c: float
    kl_delay: float
    kl_false_alarm: float


class LordenResponse(BaseModel):
    """Real-time operating characteristics for alpha = H - 1/2."""
    hurst: float
    theta: float
    c: float
    expected_delay_time: float
    expected_false_alarm_time: float


def register_detector_tools(mcp: FastMCP) -> None:
    """Register CUSUM detector tools."""

    @mcp.tool(name=TOOL_CALIBRATE_THRESHOLD, description="""Calibrate the CUSUM threshold.

    Solves h(c) = gamma, h(x) = e^x - x - 1, for the unique c > 0: the
    threshold whose K-L false-alarm divergence equals the budget gamma.

    Args:
        gamma: False-alarm budget, > 0

    Returns:
        c together with g(c) and h(c)
    """)
    async def calibrate(gamma: float) -> ThresholdResponse | dict:
        try:
            threshold = calibrate_threshold(gamma)
        except ValueError as e:
            return {"error": str(e)}
        g, h = theoretical_characteristics(threshold)
        return ThresholdResponse(gamma=gamma, c=threshold.c, g=g, h=h)

    @mcp.tool(name=TOOL_GET_THEORETICAL_CHARACTERISTICS, description="""\
    Get the closed-form operating characteristics of a threshold.

    kl_delay = g(c) = e^-c + c - 1 is the worst-case K-L detection divergence
    (expected 1/2 <u> at the alarm when the change happens at 0).
    kl_false_alarm = h(c) = e^c - c - 1 is the K-L false-alarm divergence.

    Args:
        c: CUSUM threshold, > 0
    """)
    async def get_theoretical_characteristics(c: float) -> CharacteristicsResponse | dict:
        try:
            g, h = theoretical_characteristics(c)
        except ValueError as e:
            return {"error": str(e)}
        return CharacteristicsResponse(c=c, kl_delay=g, kl_false_alarm=h)

    @mcp.tool(name=TOOL_GET_LORDEN_CHARACTERISTICS, description="""\
    Get real-time expected delay and time to false alarm.

    Valid for the polynomial drift theta * t^(H - 1/2), where <u>_t grows
    linearly with slope kappa = theta^2 v. Returns 2 g(c) / kappa and
    2 h(c) / kappa.

    Args:
        hurst: Hurst index in [0.01, 0.99]
        theta: Drift amplitude, nonzero
        c: CUSUM threshold, > 0
    """)
    async def get_lorden_characteristics(
        hurst: float,
        theta: float,
        c: float,
    ) -> LordenResponse | dict:
        try:
            delay, false_alarm = lorden_characteristics_poly(hurst, theta, c)
        except (ValueError, ZeroDivisionError) as e:
            return {"error": str(e)}
        return LordenResponse(
            hurst=hurst,
            theta=theta,
            c=c,
            expected_delay_time=delay,
            expected_false_alarm_time=false_alarm,
        )
