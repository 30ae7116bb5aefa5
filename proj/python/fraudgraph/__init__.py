"""Relational graph convolution fraud detection on card/merchant transaction graphs."""

from ._fraudgraph import (
    CheckpointError,
    ConfigError,
    EncoderConfig,
    GenConfig,
    GradReport,
    Metrics,
    ModelConfig,
    ParseError,
    TrainConfig,
    TrainedModel,
    TrainingError,
    TransactionRecord,
    WorkflowStats,
    focal_loss,
    focal_loss_grad_logit,
    generate,
    gradient_check,
    load_model,
    read_transactions,
    run_cli,
    simulate,
    train,
    write_transactions,
)

__all__ = [
    "CheckpointError",
    "ConfigError",
    "EncoderConfig",
    "GenConfig",
    "GradReport",
    "Metrics",
    "ModelConfig",
    "ParseError",
    "TrainConfig",
    "TrainedModel",
    "TrainingError",
    "TransactionRecord",
    "WorkflowStats",
    "focal_loss",
    "focal_loss_grad_logit",
    "generate",
    "gradient_check",
    "load_model",
    "read_transactions",
    "run_cli",
    "simulate",
    "train",
    "write_transactions",
]
