"""Architecture widths and depths."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class ModelConfig:
    text_dim: int = 900
    vision_dim: int = 512
    va_hidden: int = 2048
    vt_dim: int = 512
    ta_heads: int = 3
    vt_heads: int = 4
    ta_depth: int = 3
    vt_depth: int = 2
    ffn_mult: int = 2
    ln_eps: float = 1e-5
    n_classes: int = 3

    @classmethod
    def small(cls) -> "ModelConfig":
        """Reduced widths for multi-seed experiments and gradient checks."""
        return cls(text_dim=48, va_hidden=64, vt_dim=32)

    @classmethod
    def preset(cls, name: str) -> "ModelConfig":
        if name == "paper":
            return cls()
        if name == "small":
            return cls.small()
        raise ValueError(f"unknown model preset {name!r} (expected 'paper' or 'small')")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        return cls(**d)

    @property
    def embedding_sub_dim(self) -> int:
        if self.text_dim % 3:
            raise ValueError(f"text_dim {self.text_dim} is not three sub-tables wide")
        return self.text_dim // 3
