# ladris/harness/schedule.py

from typing import Callable


def polynomial_lr(base_lr: float, step: int, total_steps: int, power: float) -> float:
    """base * (1 - t/T)^power, clamped to zero past T."""
    if total_steps <= 0:
        raise ValueError("total_steps must be positive")
    remaining = max(0.0, 1.0 - step / total_steps)
    return base_lr * remaining ** power


def polynomial_factor(total_steps: int, power: float) -> Callable[[int], float]:
    """Multiplicative factor for torch's LambdaLR."""
    return lambda step: polynomial_lr(1.0, step, total_steps, power)
