"""Code generation from payoff expressions: flattened kernels and source text."""

from .kernel import (
    KDay,
    Kernel,
    KernelInput,
    KLoop,
    KObs,
    KPay,
    discount_rows,
    eval_kernel,
    eval_kernel_batch,
    reindex,
    sample_input,
)

__all__ = [
    "KDay", "Kernel", "KernelInput", "KLoop", "KObs", "KPay", "discount_rows", "eval_kernel",
    "eval_kernel_batch", "reindex", "sample_input",
]
