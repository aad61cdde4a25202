"""Shared training infrastructure for the torch-based classifiers.

Training is bit-deterministic for a fixed (data, config, seed): the seed
drives weight init, dropout, and batch shuffling through torch's global
generator, the thread count is pinned to one during optimization, and the
best-validation weights are restored at the end.
"""

from __future__ import annotations

import copy
import hashlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import torch

from polyfuse import errors


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 1e-3
    patience: int = 5  # early stop on stagnant validation accuracy

    def as_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "patience": self.patience,
        }


@dataclass
class TrainHistory:
    epochs: list[dict] = field(default_factory=list)
    best_epoch: int = -1
    best_val_accuracy: float = float("nan")
    final_loss: float = float("nan")

    def as_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "best_epoch": self.best_epoch,
            "best_val_accuracy": self.best_val_accuracy,
            "final_loss": self.final_loss,
        }


def weights_hash(module: torch.nn.Module) -> str:
    """Order-stable digest of all parameters and buffers."""
    h = hashlib.sha256()
    state = module.state_dict()
    for name in sorted(state):
        tensor = state[name].detach().cpu().contiguous()
        h.update(name.encode())
        h.update(str(tensor.dtype).encode())
        h.update(str(tuple(tensor.shape)).encode())
        h.update(tensor.numpy().tobytes())
    return h.hexdigest()


def check_binary_labels(labels: torch.Tensor) -> None:
    present = torch.unique(labels)
    if present.numel() < 2:
        raise errors.DegenerateLabels(
            f"training labels contain a single class: {present.tolist()}"
        )


def fit(
    model: torch.nn.Module,
    train_inputs: Sequence[torch.Tensor],
    train_labels: torch.Tensor,
    val_inputs: Sequence[torch.Tensor],
    val_labels: torch.Tensor,
    config: TrainConfig,
    loss_fn: Callable[[torch.Tensor, torch.Tensor], torch.Tensor],
    predict_fn: Callable[[torch.Tensor], torch.Tensor],
) -> TrainHistory:
    """Adam loop with per-epoch validation and best-weight retention.

    ``predict_fn`` maps logits to hard 0/1 labels for accuracy tracking.
    The retained weights maximize validation accuracy with validation loss
    as the tie-breaker; small validation splits saturate accuracy early,
    and without the tie-break the first lucky epoch would be kept forever.
    Raises DegenerateLabels before training and NonFiniteLoss (with the
    offending epoch/batch in the message) if optimization diverges.
    """
    check_binary_labels(train_labels)
    torch.set_num_threads(1)

    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    n = train_labels.shape[0]
    history = TrainHistory()
    best_state = copy.deepcopy(model.state_dict())
    best_key = (-1.0, -float("inf"))
    stale = 0
    loss_value = float("nan")

    for epoch in range(config.epochs):
        model.train()
        order = torch.randperm(n)
        epoch_loss = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            batch = [t[idx] for t in train_inputs]
            optimizer.zero_grad()
            logits = model(*batch)
            loss = loss_fn(logits, train_labels[idx])
            if not torch.isfinite(loss):
                raise errors.NonFiniteLoss(
                    f"loss became non-finite at epoch {epoch}, batch offset {start} "
                    f"(lr={config.learning_rate}, batch_size={config.batch_size})"
                )
            loss.backward()
            optimizer.step()
            epoch_loss += float(loss.detach()) * idx.shape[0]
        loss_value = epoch_loss / n

        val_acc, val_loss = evaluate_split(
            model, val_inputs, val_labels, loss_fn, predict_fn
        )
        history.epochs.append(
            {
                "epoch": epoch,
                "train_loss": loss_value,
                "val_accuracy": val_acc,
                "val_loss": val_loss,
            }
        )
        if (val_acc, -val_loss) > best_key:
            best_key = (val_acc, -val_loss)
            best_state = copy.deepcopy(model.state_dict())
            history.best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale > config.patience:
                break

    model.load_state_dict(best_state)
    history.best_val_accuracy = best_key[0]
    history.final_loss = loss_value
    return history


@torch.no_grad()
def evaluate_split(
    model: torch.nn.Module,
    inputs: Sequence[torch.Tensor],
    labels: torch.Tensor,
    loss_fn: Callable[[torch.Tensor, torch.Tensor], torch.Tensor],
    predict_fn: Callable[[torch.Tensor], torch.Tensor],
    batch_size: int = 64,
) -> tuple[float, float]:
    model.eval()
    n = labels.shape[0]
    correct = 0
    total_loss = 0.0
    for start in range(0, n, batch_size):
        batch = [t[start : start + batch_size] for t in inputs]
        y = labels[start : start + batch_size]
        logits = model(*batch)
        correct += int((predict_fn(logits) == y).sum())
        total_loss += float(loss_fn(logits, y)) * y.shape[0]
    if n == 0:
        return float("nan"), float("nan")
    return correct / n, total_loss / n


def softmax_loss(logits: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
    return torch.nn.functional.cross_entropy(logits, labels)


def softmax_predict(logits: torch.Tensor) -> torch.Tensor:
    return logits.argmax(dim=1)


def sigmoid_loss(logits: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
    return torch.nn.functional.binary_cross_entropy_with_logits(
        logits.squeeze(1), labels.to(logits.dtype)
    )


def sigmoid_predict(logits: torch.Tensor) -> torch.Tensor:
    return (torch.sigmoid(logits.squeeze(1)) > 0.5).long()


def probability_pair_from_softmax(logits: torch.Tensor) -> np.ndarray:
    """(p_negative, p_positive) rows from 2-logit outputs."""
    probs = torch.softmax(logits, dim=1).detach().cpu().numpy()
    return probs.astype(np.float64)


def probability_pair_from_sigmoid(logits: torch.Tensor) -> np.ndarray:
    """(p_negative, p_positive) rows from a single-logit head.

    The pair is built by complement so it sums to 1.0 exactly.
    """
    p_pos = torch.sigmoid(logits.squeeze(1)).detach().cpu().numpy().astype(np.float64)
    return np.stack([1.0 - p_pos, p_pos], axis=1)


def central_difference_gradcheck(
    loss_fn: Callable[[], torch.Tensor],
    parameters: Sequence[torch.Tensor],
    eps: float = 1e-5,
) -> float:
    """Worst relative disagreement between autograd and central differences.

    ``loss_fn`` must be a closure re-evaluating the loss from the current
    parameter values. The relative error per parameter tensor is
    ||g_a - g_fd|| / max(||g_a||, ||g_fd||, 1e-12). Parameters should be
    float64 for the finite differences to be trustworthy.
    """
    params = [p for p in parameters if p.requires_grad]
    loss = loss_fn()
    analytic = torch.autograd.grad(loss, params)

    worst = 0.0
    for p, grad in zip(params, analytic):
        fd = torch.zeros_like(p)
        flat = p.data.view(-1)
        fd_flat = fd.view(-1)
        for i in range(flat.numel()):
            original = float(flat[i])
            flat[i] = original + eps
            hi = float(loss_fn().detach())
            flat[i] = original - eps
            lo = float(loss_fn().detach())
            flat[i] = original
            fd_flat[i] = (hi - lo) / (2.0 * eps)
        num = float(torch.linalg.vector_norm(grad - fd))
        den = max(
            float(torch.linalg.vector_norm(grad)),
            float(torch.linalg.vector_norm(fd)),
            1e-12,
        )
        worst = max(worst, num / den)
    return worst


def relative_error(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-12)
