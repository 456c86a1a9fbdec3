#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 09:40:11"
# File: ./src/docpair/autodiff.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./src/docpair/autodiff.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Minimal reverse-mode differentiation over numpy arrays.

Every primitive builds a node that remembers its parents, a forward
function and a backward function. ``Tensor.backward`` walks the graph in
reverse topological order; ``trace`` exposes that order as a
``ComputationRecord`` that can replay the forward pass.

Training runs in float32. ``precision(np.float64)`` switches the default
dtype for gradient certification with ``gradcheck``.
"""

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import (
    DegenerateInputError,
    DimensionError,
    GradcheckFailure,
    NonFiniteError,
)

logger = logging.getLogger(__name__)

_DEFAULT_DTYPE = np.dtype(np.float32)

NORM_EPS = 1e-12
LOG_EPS = 1e-12

ArrayLike = Union["Tensor", np.ndarray, float, int, Sequence[float]]


def get_default_dtype() -> np.dtype:
    return _DEFAULT_DTYPE


@contextmanager
def precision(dtype=np.float64):
    """Temporarily change the dtype new tensors are created with."""
    global _DEFAULT_DTYPE
    previous = _DEFAULT_DTYPE
    _DEFAULT_DTYPE = np.dtype(dtype)
    try:
        yield _DEFAULT_DTYPE
    finally:
        _DEFAULT_DTYPE = previous


class Tensor:
    """
    Dense float array with optional gradient tracking.

    Parameters
    ----------
    data : array-like
        Values; converted to the current default dtype unless ``dtype`` is given.
    requires_grad : bool
        Whether gradients should be accumulated into ``grad``.
    dtype : numpy dtype, optional
        Explicit storage dtype.
    """

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        dtype=None,
        name: Optional[str] = None,
    ):
        if isinstance(data, Tensor):
            data = data.data
        self.data = np.array(data, dtype=dtype or _DEFAULT_DTYPE)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self.op = "leaf"
        self._parents: Tuple[Tensor, ...] = ()
        self._forward: Optional[Callable[..., np.ndarray]] = None
        self._backward: Optional[Callable[[np.ndarray], Tuple]] = None

    # ---- construction -------------------------------------------------
    @classmethod
    def _from_op(
        cls,
        op: str,
        forward: Callable[..., np.ndarray],
        parents: Tuple["Tensor", ...],
        backward: Callable[[np.ndarray], Tuple],
    ) -> "Tensor":
        data = forward(*(p.data for p in parents))
        out = cls.__new__(cls)
        out.data = np.asarray(data)
        out.requires_grad = any(p.requires_grad for p in parents)
        out.grad = None
        out.name = None
        out.op = op
        out._parents = parents
        out._forward = forward
        out._backward = backward
        return out

    # ---- properties ---------------------------------------------------
    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def T(self) -> "Tensor":
        return transpose(self)

    def item(self) -> float:
        if self.data.size != 1:
            raise DimensionError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy(), requires_grad=False, dtype=self.data.dtype)

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, op={self.op}, requires_grad={self.requires_grad})"

    def __len__(self) -> int:
        return self.shape[0]

    # ---- reverse sweep ------------------------------------------------
    def backward(self, grad: Optional[np.ndarray] = None) -> None:
        """Accumulate d(self)/d(leaf) into every leaf that requires grad."""
        if not self.requires_grad:
            return
        if grad is None:
            if self.data.size != 1:
                raise DimensionError(
                    f"backward() without a seed gradient needs a scalar, got shape {self.shape}"
                )
            grad = np.ones_like(self.data)
        grads: Dict[int, np.ndarray] = {id(self): np.asarray(grad, dtype=self.data.dtype)}
        for node in reversed(_topological_order(self)):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if not node._parents:
                if node.grad is None:
                    node.grad = np.zeros_like(node.data)
                node.grad += g
                continue
            parent_grads = node._backward(g)
            for parent, pg in zip(node._parents, parent_grads):
                if pg is None or not parent.requires_grad:
                    continue
                if id(parent) in grads:
                    grads[id(parent)] = grads[id(parent)] + pg
                else:
                    grads[id(parent)] = pg

    # ---- operators ----------------------------------------------------
    def __add__(self, other): return add(self, other)
    def __radd__(self, other): return add(other, self)
    def __sub__(self, other): return sub(self, other)
    def __rsub__(self, other): return sub(other, self)
    def __mul__(self, other): return mul(self, other)
    def __rmul__(self, other): return mul(other, self)
    def __truediv__(self, other): return div(self, other)
    def __rtruediv__(self, other): return div(other, self)
    def __neg__(self): return neg(self)
    def __matmul__(self, other): return matmul(self, other)
    def __getitem__(self, index): return getitem(self, index)

    def sum(self, axis=None, keepdims=False): return tsum(self, axis, keepdims)
    def mean(self, axis=None, keepdims=False): return mean(self, axis, keepdims)
    def exp(self): return exp(self)
    def log(self): return log(self)
    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)
    def transpose(self, *axes): return transpose(self, axes or None)


def _topological_order(root: Tensor) -> List[Tensor]:
    order: List[Tensor] = []
    seen = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in seen:
                stack.append((parent, False))
    return order


# ---- computation record ---------------------------------------------------
@dataclass
class ComputationRecord:
    """Ordered log of the primitive applications that produced ``output``."""

    output: Tensor
    nodes: List[Tensor] = field(default_factory=list)

    @property
    def ops(self) -> List[str]:
        return [n.op for n in self.nodes if n._parents]

    def leaves(self) -> List[Tensor]:
        return [n for n in self.nodes if not n._parents]

    def replay(self) -> Tensor:
        """Recompute every recorded node from the current leaf values."""
        for node in self.nodes:
            if node._parents:
                node.data = np.asarray(node._forward(*(p.data for p in node._parents)))
        return self.output


def trace(output: Tensor) -> ComputationRecord:
    return ComputationRecord(output=output, nodes=_topological_order(output))


# ---- helpers --------------------------------------------------------------
def as_tensor(value: ArrayLike) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _check_finite(x: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(x)):
        raise NonFiniteError(f"{what}: non-finite input")


# ---- elementwise ----------------------------------------------------------
def add(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return Tensor._from_op(
        "add",
        np.add,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
    )


def sub(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return Tensor._from_op(
        "sub",
        np.subtract,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
    )


def mul(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return Tensor._from_op(
        "mul",
        np.multiply,
        (a, b),
        lambda g: (_unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)),
    )


def div(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return Tensor._from_op(
        "div",
        np.divide,
        (a, b),
        lambda g: (
            _unbroadcast(g / b.data, a.shape),
            _unbroadcast(-g * a.data / (b.data * b.data), b.shape),
        ),
    )


def neg(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    return Tensor._from_op("neg", np.negative, (a,), lambda g: (-g,))


def exp(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    out_holder: List[Tensor] = []
    out = Tensor._from_op("exp", np.exp, (a,), lambda g: (g * out_holder[0].data,))
    out_holder.append(out)
    return out


def log(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    return Tensor._from_op("log", np.log, (a,), lambda g: (g / a.data,))


def sqrt(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    out_holder: List[Tensor] = []
    out = Tensor._from_op("sqrt", np.sqrt, (a,), lambda g: (g * 0.5 / out_holder[0].data,))
    out_holder.append(out)
    return out


def clamp_min(a: ArrayLike, floor: float) -> Tensor:
    """max(a, floor); values at or below the floor get zero gradient."""
    a = as_tensor(a)
    return Tensor._from_op(
        "clamp_min",
        lambda x: np.maximum(x, np.asarray(floor, dtype=x.dtype)),
        (a,),
        lambda g: (g * (a.data > floor),),
    )


def gelu(x: ArrayLike) -> Tensor:
    """Gaussian error linear unit, tanh form."""
    x = as_tensor(x)
    c = np.sqrt(2.0 / np.pi)

    def forward(v):
        return 0.5 * v * (1.0 + np.tanh(c * (v + 0.044715 * v**3)))

    def backward(g):
        v = x.data
        t = np.tanh(c * (v + 0.044715 * v**3))
        dt = (1.0 - t * t) * c * (1.0 + 3.0 * 0.044715 * v * v)
        return (g * (0.5 * (1.0 + t) + 0.5 * v * dt),)

    return Tensor._from_op("gelu", forward, (x,), backward)


# ---- shape ----------------------------------------------------------------
def matmul(a: ArrayLike, b: ArrayLike) -> Tensor:
    """Matrix product over the last two axes; leading axes broadcast."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError(f"matmul shape mismatch: {a.shape} @ {b.shape}")

    def backward(g):
        ga = np.matmul(g, np.swapaxes(b.data, -1, -2))
        gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return Tensor._from_op("matmul", np.matmul, (a, b), backward)


def transpose(a: ArrayLike, axes: Optional[Sequence[int]] = None) -> Tensor:
    a = as_tensor(a)
    if axes is None:
        axes = list(range(a.ndim))
        axes[-1], axes[-2] = axes[-2], axes[-1]
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))
    return Tensor._from_op(
        "transpose",
        lambda x: np.transpose(x, axes),
        (a,),
        lambda g: (np.transpose(g, inverse),),
    )


def reshape(a: ArrayLike, shape: Sequence[int]) -> Tensor:
    a = as_tensor(a)
    shape = tuple(shape)
    return Tensor._from_op(
        "reshape",
        lambda x: np.reshape(x, shape),
        (a,),
        lambda g: (np.reshape(g, a.shape),),
    )


def getitem(a: ArrayLike, index) -> Tensor:
    a = as_tensor(a)

    def backward(g):
        full = np.zeros_like(a.data)
        np.add.at(full, index, g)
        return (full,)

    return Tensor._from_op("getitem", lambda x: x[index], (a,), backward)


def concat(tensors: Sequence[ArrayLike], axis: int = 0) -> Tensor:
    parts = tuple(as_tensor(t) for t in tensors)
    sizes = [p.shape[axis] for p in parts]
    splits = np.cumsum(sizes)[:-1]

    def backward(g):
        return tuple(np.split(g, splits, axis=axis))

    return Tensor._from_op(
        "concat", lambda *xs: np.concatenate(xs, axis=axis), parts, backward
    )


def stack(tensors: Sequence[ArrayLike], axis: int = 0) -> Tensor:
    parts = tuple(as_tensor(t) for t in tensors)

    def backward(g):
        return tuple(np.take(g, i, axis=axis) for i in range(len(parts)))

    return Tensor._from_op("stack", lambda *xs: np.stack(xs, axis=axis), parts, backward)


# ---- reductions -----------------------------------------------------------
def tsum(a: ArrayLike, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)

    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return Tensor._from_op(
        "sum", lambda x: np.sum(x, axis=axis, keepdims=keepdims), (a,), backward
    )


def mean(a: ArrayLike, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    count = a.size if axis is None else int(np.prod([a.shape[ax] for ax in np.atleast_1d(axis)]))
    return tsum(a, axis, keepdims) / float(count)


def logsumexp(x: ArrayLike, axis: int = -1, keepdims: bool = False) -> Tensor:
    """Stable log-sum-exp along ``axis``."""
    x = as_tensor(x)

    def forward(v):
        m = np.max(v, axis=axis, keepdims=True)
        out = m + np.log(np.sum(np.exp(v - m), axis=axis, keepdims=True))
        return out if keepdims else np.squeeze(out, axis=axis)

    def backward(g):
        v = x.data
        m = np.max(v, axis=axis, keepdims=True)
        e = np.exp(v - m)
        s = e / np.sum(e, axis=axis, keepdims=True)
        if not keepdims:
            g = np.expand_dims(g, axis)
        return (g * s,)

    return Tensor._from_op("logsumexp", forward, (x,), backward)


# ---- normalisation & distributions ---------------------------------------
def row_softmax(x: ArrayLike, temperature: float = 1.0) -> Tensor:
    """Softmax over the last axis of ``x / temperature`` with max-subtraction."""
    x = as_tensor(x)
    if not temperature > 0:
        raise DegenerateInputError(f"temperature must be > 0, got {temperature}")
    _check_finite(x.data, "row_softmax")
    tau = float(temperature)
    out_holder: List[Tensor] = []

    def forward(v):
        z = v / tau
        z = z - np.max(z, axis=-1, keepdims=True)
        e = np.exp(z)
        return e / np.sum(e, axis=-1, keepdims=True)

    def backward(g):
        s = out_holder[0].data
        return ((s * (g - np.sum(g * s, axis=-1, keepdims=True))) / tau,)

    out = Tensor._from_op("row_softmax", forward, (x,), backward)
    out_holder.append(out)
    return out


def log_row_softmax(x: ArrayLike, temperature: float = 1.0) -> Tensor:
    x = as_tensor(x)
    if not temperature > 0:
        raise DegenerateInputError(f"temperature must be > 0, got {temperature}")
    _check_finite(x.data, "log_row_softmax")
    z = x / float(temperature) if temperature != 1.0 else x
    return z - logsumexp(z, axis=-1, keepdims=True)


def l2_normalize(x: ArrayLike, axis: int = -1, eps: float = NORM_EPS) -> Tensor:
    """Scale ``x`` to unit L2 norm along ``axis``."""
    x = as_tensor(x)
    norms = np.sqrt(np.sum(x.data.astype(np.float64) ** 2, axis=axis))
    if np.any(norms <= eps):
        raise DegenerateInputError(f"l2_normalize: norm below {eps}")
    out_holder: List[Tensor] = []

    def forward(v):
        return v / np.sqrt(np.sum(v * v, axis=axis, keepdims=True))

    def backward(g):
        v = x.data
        n = np.sqrt(np.sum(v * v, axis=axis, keepdims=True))
        y = out_holder[0].data
        return ((g - y * np.sum(g * y, axis=axis, keepdims=True)) / n,)

    out = Tensor._from_op("l2_normalize", forward, (x,), backward)
    out_holder.append(out)
    return out


def layer_norm(x: ArrayLike, gain: ArrayLike, bias: ArrayLike, eps: float = 1e-5) -> Tensor:
    """Normalise over the last axis, then scale by ``gain`` and shift by ``bias``."""
    x, gain, bias = as_tensor(x), as_tensor(gain), as_tensor(bias)
    d = x.shape[-1]
    if gain.shape != (d,) or bias.shape != (d,):
        raise DimensionError(
            f"layer_norm: gain {gain.shape} / bias {bias.shape} do not match feature dim {d}"
        )

    def _stats(v):
        mu = np.mean(v, axis=-1, keepdims=True)
        var = np.mean((v - mu) ** 2, axis=-1, keepdims=True)
        return mu, 1.0 / np.sqrt(var + eps)

    def forward(v, w, b):
        mu, inv = _stats(v)
        return (v - mu) * inv * w + b

    def backward(g):
        v = x.data
        mu, inv = _stats(v)
        xhat = (v - mu) * inv
        dxhat = g * gain.data
        dx = inv * (
            dxhat
            - np.mean(dxhat, axis=-1, keepdims=True)
            - xhat * np.mean(dxhat * xhat, axis=-1, keepdims=True)
        )
        return dx, _unbroadcast(g * xhat, gain.shape), _unbroadcast(g, bias.shape)

    return Tensor._from_op("layer_norm", forward, (x, gain, bias), backward)


def embedding_lookup(table: Tensor, ids) -> Tensor:
    """Rows of ``table`` selected by integer ``ids`` (any shape)."""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise DimensionError(
            f"embedding_lookup: ids must lie in [0, {table.shape[0]}), got range "
            f"[{ids.min()}, {ids.max()}]"
        )
    return getitem(table, ids)


def mean_pool(x: ArrayLike, mask: Optional[np.ndarray] = None) -> Tensor:
    """
    Average over the sequence axis (second to last).

    ``mask`` marks valid positions with 1 and padding with 0; masked
    positions do not contribute.
    """
    x = as_tensor(x)
    if mask is None:
        return mean(x, axis=-2)
    mask = np.asarray(mask, dtype=x.dtype)
    if mask.shape != x.shape[:-1]:
        raise DimensionError(f"mean_pool: mask {mask.shape} vs features {x.shape}")
    weights = mask / np.maximum(mask.sum(axis=-1, keepdims=True), 1.0)
    return tsum(x * Tensor(weights[..., None], dtype=x.dtype), axis=-2)


def cross_entropy(predicted: ArrayLike, target: ArrayLike, eps: float = LOG_EPS) -> Tensor:
    """
    −Σ target·log(predicted) over the last axis, averaged over leading rows.

    ``predicted`` must hold probabilities; every ``target`` row must sum to 1.
    """
    predicted, target = as_tensor(predicted), as_tensor(target)
    if predicted.shape != target.shape:
        raise DimensionError(
            f"cross_entropy shape mismatch: {predicted.shape} vs {target.shape}"
        )
    row_sums = np.sum(target.data, axis=-1)
    if np.any(np.abs(row_sums - 1.0) > 1e-6):
        raise DegenerateInputError("cross_entropy: target rows must sum to 1")
    per_row = -tsum(target * log(clamp_min(predicted, eps)), axis=-1)
    return mean(per_row) if per_row.ndim else per_row


# ---- gradient certification ----------------------------------------------
@dataclass
class GradcheckReport:
    """Per-leaf maximum relative error between analytic and numeric gradients."""

    errors: Dict[str, float]
    tolerance: float
    step: float
    checked_entries: int

    @property
    def passed(self) -> bool:
        return all(err <= self.tolerance for err in self.errors.values())

    @property
    def max_error(self) -> float:
        return max(self.errors.values()) if self.errors else 0.0

    def format(self) -> str:
        lines = [f"{'leaf':<40} {'max rel err':>12}"]
        for name, err in sorted(self.errors.items()):
            flag = "ok" if err <= self.tolerance else "FAIL"
            lines.append(f"{name:<40} {err:>12.3e} {flag}")
        lines.append(f"tolerance={self.tolerance:g} step={self.step:g} passed={self.passed}")
        return "\n".join(lines)


def gradcheck(
    function: Callable[[], Tensor],
    leaves: Union[Mapping[str, Tensor], Sequence[Tensor]],
    step: float = 1e-5,
    tolerance: float = 1e-5,
    max_entries_per_leaf: Optional[int] = None,
    seed: int = 0,
    floor: float = 1e-6,
) -> GradcheckReport:
    """
    Compare reverse-mode gradients with central finite differences.

    ``function`` is re-evaluated for every perturbation and must return a
    scalar built from ``leaves``. Relative error is
    |analytic − numeric| / max(|analytic|, |numeric|, floor).
    """
    if not isinstance(leaves, Mapping):
        leaves = {f"leaf{i}": t for i, t in enumerate(leaves)}
    for name, leaf in leaves.items():
        if leaf.dtype != np.float64:
            raise GradcheckFailure(f"gradcheck needs float64 leaves, {name} is {leaf.dtype}")

    for leaf in leaves.values():
        leaf.zero_grad()
    out = function()
    if out.size != 1:
        raise GradcheckFailure(f"gradcheck needs a scalar output, got shape {out.shape}")
    out.backward()
    analytic = {name: leaf.grad.copy() for name, leaf in leaves.items()}

    rng = np.random.default_rng(seed)
    errors: Dict[str, float] = {}
    checked = 0
    for name, leaf in leaves.items():
        flat = leaf.data.reshape(-1)
        positions = np.arange(flat.size)
        if max_entries_per_leaf is not None and flat.size > max_entries_per_leaf:
            positions = np.sort(rng.choice(flat.size, size=max_entries_per_leaf, replace=False))
        worst = 0.0
        for pos in positions:
            original = flat[pos]
            flat[pos] = original + step
            f_plus = function().item()
            flat[pos] = original - step
            f_minus = function().item()
            flat[pos] = original
            numeric = (f_plus - f_minus) / (2.0 * step)
            a = analytic[name].reshape(-1)[pos]
            rel = abs(a - numeric) / max(abs(a), abs(numeric), floor)
            worst = max(worst, rel)
            checked += 1
        errors[name] = float(worst)
        logger.debug("gradcheck %s: max rel err %.3e", name, worst)

    return GradcheckReport(errors=errors, tolerance=tolerance, step=step, checked_entries=checked)


# EOF
