"""Multi-band learning rates scaled by batch size relative to 8."""

from __future__ import annotations

from dataclasses import dataclass

BAND_EXPONENTS = {"coarse": 0.5, "triadic": 0.3, "fine": 0.2}


@dataclass(frozen=True)
class FractalBands:
    coarse_lr: float
    triadic_lr: float
    fine_lr: float

    def rate(self, band: str) -> float:
        return getattr(self, f"{band}_lr")

    @classmethod
    def uniform(cls, lr: float) -> "FractalBands":
        return cls(lr, lr, lr)


def fractal_lr_bands(base_lr: float, batch_size: int) -> FractalBands:
    """base_lr * (batch_size / 8) ** {0.5, 0.3, 0.2} for coarse, triadic, fine.

    At batch size 8 the scale is 1 and all three bands coincide.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    if base_lr < 0:
        raise ValueError("base_lr must be non-negative")
    scale = batch_size / 8.0
    return FractalBands(*(base_lr * scale ** BAND_EXPONENTS[b] for b in ("coarse", "triadic", "fine")))
