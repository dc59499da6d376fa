from fraccusum.tools.tool_names import (
    TOOL_CALIBRATE_THRESHOLD,
    TOOL_GET_LORDEN_CHARACTERISTICS,
    TOOL_GET_POLY_COEFFICIENTS,
    TOOL_GET_THEORETICAL_CHARACTERISTICS,
    TOOL_RUN_EXPERIMENT,
)

EXPERIMENT_WORKFLOW_INSTRUCTIONS = f"""\
# Checking the detector against its closed forms

> Call this tool when asked whether the CUSUM detector achieves its \
theoretical delay or false-alarm characteristics for some Hurst index \
and drift.

## Step 1. Fix the threshold

- Given a false-alarm budget gamma: call {TOOL_CALIBRATE_THRESHOLD}(gamma=...) \
and keep `c`.
- Given a threshold c directly: call {TOOL_GET_THEORETICAL_CHARACTERISTICS}(c=...).

Note g(c) (worst-case K-L delay) and h(c) (K-L false alarm).

## Step 2. Choose the grid

- The horizon step * count must be long enough for almost every path to \
alarm. A censor rate above 1% biases every estimate: **increase count** \
and rerun rather than reporting the biased numbers.
- A finer step shrinks the overshoot (y above c at the alarm), which biases \
both characteristics upward.

## Step 3. Run both regimes

Call {TOOL_RUN_EXPERIMENT} twice with the same parameters:

1. regime="pre_change": `half_qv_at_stop` and `neg_u_at_stop` should both \
match h(c).
2. regime="post_change_at_zero": `half_qv_at_stop` and `u_at_stop` should \
both match g(c).

In both runs `wald_gap` should be near 0.

## Step 4. Lorden case (optional)

If the drift is polynomial with alpha = H - 1/2, the `stop_time` row also \
carries a theory value. Cross-check it with \
{TOOL_GET_LORDEN_CHARACTERISTICS}(hurst=..., theta=..., c=...). \
{TOOL_GET_POLY_COEFFICIENTS} gives the slope coefficient v.

## Step 5. Report

- Quote each estimate with its standard error and z-score.
- |z| up to about 3 is consistent with the theory. Larger values with a \
small overshoot mean point to a problem; with a large overshoot mean, \
refine the step first.
- Always report the censor rate and the number of failed replicates.
"""
