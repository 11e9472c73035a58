"""The four-subnetwork edge compatibility model.

Each subnetwork scores a concatenated tile pair (50 x 100 pixels) with a
single real number. Red-Net, Green-Net and Blue-Net see one color channel,
RGB-Net sees all three; all four share one architecture: bias-free
convolutions and linear layers with ReLU activations, about 3.4M parameters
in total across the four subnetworks.
"""

from __future__ import annotations

import torch
from torch import nn

SUBNET_NAMES = ("red", "green", "blue", "rgb")


class EdgeScorer(nn.Module):
    """One subnetwork: conv stack into two linear layers producing a scalar."""

    def __init__(self, in_channels: int):
        super().__init__()
        self.conv1 = nn.Conv2d(in_channels, 16, 5, padding=2, bias=False)
        self.pool1 = nn.MaxPool2d(4)
        self.conv2 = nn.Conv2d(16, 32, 3, padding=1, bias=False)
        self.pool2 = nn.MaxPool2d(2)
        self.conv3 = nn.Conv2d(32, 48, 3, padding=1, bias=False)
        self.fc1 = nn.Linear(48 * 6 * 12, 240, bias=False)
        self.fc2 = nn.Linear(240, 1, bias=False)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = self.pool1(torch.relu(self.conv1(x)))
        x = self.pool2(torch.relu(self.conv2(x)))
        x = torch.relu(self.conv3(x))
        x = torch.relu(self.fc1(x.flatten(1)))
        return self.fc2(x).squeeze(-1)


class FourNet(nn.Module):
    """Red/Green/Blue single-channel subnetworks plus a three-channel RGB one."""

    def __init__(self):
        super().__init__()
        self.red = EdgeScorer(1)
        self.green = EdgeScorer(1)
        self.blue = EdgeScorer(1)
        self.rgb = EdgeScorer(3)

    def subnet_inputs(self, pair: torch.Tensor) -> dict[str, torch.Tensor]:
        """Slice a (B, 3, H, W) pair batch into each subnetwork's input."""
        return {
            "red": pair[:, 0:1],
            "green": pair[:, 1:2],
            "blue": pair[:, 2:3],
            "rgb": pair,
        }

    def forward(self, pair: torch.Tensor) -> dict[str, torch.Tensor]:
        inputs = self.subnet_inputs(pair)
        return {name: getattr(self, name)(inputs[name]) for name in SUBNET_NAMES}

    def combined(self, pair: torch.Tensor, rule: str = "sum") -> torch.Tensor:
        """Score a pair batch with one subnetwork or the (default) sum of all."""
        if rule in SUBNET_NAMES:
            return getattr(self, rule)(self.subnet_inputs(pair)[rule])
        if rule != "sum":
            raise ValueError(f"unknown combination rule: {rule!r}")
        scores = self.forward(pair)
        return sum(scores[name] for name in SUBNET_NAMES)

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())


def triplet_loss(f_pos: torch.Tensor, f_neg: torch.Tensor) -> torch.Tensor:
    """Mean hinge with unit margin: positive pairs must outscore negatives."""
    if f_pos.shape != f_neg.shape:
        raise ValueError("positive and negative score batches must match")
    return torch.clamp(1.0 - f_pos + f_neg, min=0.0).mean()
