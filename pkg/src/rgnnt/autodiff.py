"""A small reverse-mode differentiation engine over float64 numpy arrays.

Only what the relational networks need is provided: row gathers,
concatenation, affine maps, Mish, log-sum-exp (smooth maximum) and sum
reductions over segments, absolute values and means.

Two numerical conventions matter for reproducibility:

* the forward affine map uses a non-BLAS contraction, so the value of a
  row never depends on where the row sits in the matrix;
* segment reductions sort the values of each segment before summing, so
  they depend only on the multiset of inputs, not on their order.
"""

from __future__ import annotations

import json
from typing import Callable, Iterable, Sequence

import numpy as np

DTYPE = np.float64


class ShapeMismatch(ValueError):
    pass


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, _parents: tuple = (), _backward=None):
        self.data = np.asarray(data, dtype=DTYPE)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self):
        return self.data.shape

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float(self.data)

    def __repr__(self):
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(other, -1.0) if isinstance(other, Tensor) else -other)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return scale(self, -1.0)

    def __abs__(self):
        return absolute(self)

    def backward(self, grad=None):
        """Accumulate d(self)/d(leaf) into ``leaf.grad`` for every leaf."""
        order, seen = [], set()
        stack = [(self, False)]
        while stack:
            node, done = stack.pop()
            if done:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if p.requires_grad and id(p) not in seen:
                    stack.append((p, False))
        grads = {id(self): np.ones_like(self.data) if grad is None else np.asarray(grad, DTYPE)}
        for node in reversed(order):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node._backward is None:
                node.grad = g if node.grad is None else node.grad + g
                continue
            for p, pg in zip(node._parents, node._backward(g)):
                if pg is None or not p.requires_grad:
                    continue
                prev = grads.get(id(p))
                grads[id(p)] = pg if prev is None else prev + pg


def _make(data, parents, backward) -> Tensor:
    rg = any(p.requires_grad for p in parents)
    return Tensor(data, rg, parents if rg else (), backward if rg else None)


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


# ---------------------------------------------------------------- elementwise


def add(a, b) -> Tensor:
    """``a + b`` for equal shapes, or ``b`` a row broadcast over rows of ``a``."""
    a, b = _as_tensor(a), _as_tensor(b)
    if a.shape == b.shape:
        return _make(a.data + b.data, (a, b), lambda g: (g, g))
    if b.data.ndim == 0:
        return _make(a.data + b.data, (a, b), lambda g: (g, g.sum()))
    if a.data.ndim == 2 and b.shape == a.shape[1:]:
        return _make(a.data + b.data, (a, b), lambda g: (g, g.sum(axis=0)))
    raise ShapeMismatch(f"cannot add shapes {a.shape} and {b.shape}")


def scale(a: Tensor, c: float) -> Tensor:
    return _make(a.data * c, (a,), lambda g: (g * c,))


def mul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    if a.shape != b.shape and b.data.ndim != 0:
        raise ShapeMismatch(f"cannot multiply shapes {a.shape} and {b.shape}")
    ad, bd = a.data, b.data

    def back(g):
        gb = g * ad
        return g * bd, gb if bd.ndim else gb.sum()

    return _make(ad * bd, (a, b), back)


def absolute(a: Tensor) -> Tensor:
    """``|a|`` with subgradient 0 at 0."""
    s = np.sign(a.data)
    return _make(np.abs(a.data), (a,), lambda g: (g * s,))


def softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def mish(x: Tensor) -> Tensor:
    """``x * tanh(softplus(x))``."""
    xd = x.data
    # tanh(log(1 + e)) = e(e + 2) / (e(e + 2) + 2); beyond x = 20 it is 1 in doubles
    e = np.exp(np.minimum(xd, 20.0))
    n = e * (e + 2.0)
    th = n / (n + 2.0)

    def back(g):
        sig = e / (1.0 + e)
        return (g * (th + xd * (1.0 - th * th) * sig),)

    return _make(xd * th, (x,), back)


# ---------------------------------------------------------------- structure


def reshape(x: Tensor, shape) -> Tensor:
    old = x.shape
    return _make(x.data.reshape(shape), (x,), lambda g: (g.reshape(old),))


def concat(xs: Sequence[Tensor], axis: int = 0) -> Tensor:
    xs = [_as_tensor(x) for x in xs]
    if len(xs) == 1:
        return xs[0]
    sizes = np.cumsum([x.shape[axis] for x in xs])[:-1]
    return _make(np.concatenate([x.data for x in xs], axis=axis), tuple(xs),
                 lambda g: tuple(np.split(g, sizes, axis=axis)))


def gather(x: Tensor, index) -> Tensor:
    """Rows ``x[index]``."""
    index = np.asarray(index, dtype=np.intp)
    n = x.shape[0]

    def back(g):
        out = np.zeros((n,) + g.shape[1:], dtype=DTYPE)
        if index.size:
            order = np.argsort(index, kind="stable")
            idx = index[order]
            starts = np.flatnonzero(np.r_[True, idx[1:] != idx[:-1]])
            out[idx[starts]] = np.add.reduceat(g[order], starts, axis=0)
        return (out,)

    return _make(x.data[index], (x,), back)


def total(x: Tensor) -> Tensor:
    shape = x.shape
    return _make(np.sum(x.data), (x,), lambda g: (np.full(shape, g, dtype=DTYPE),))


def mean(x: Tensor) -> Tensor:
    return scale(total(x), 1.0 / max(x.data.size, 1))


# ---------------------------------------------------------------- affine maps


def matmul_rows(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``x @ w`` computed so that each output row depends only on its input row."""
    return np.einsum("ij,jk->ik", x, w, optimize=False)


def linear(x: Tensor, w: Tensor, b: Tensor | None = None) -> Tensor:
    """``x W + b`` for ``x`` of shape (n, i), ``W`` (i, o), ``b`` (o,)."""
    if x.data.ndim != 2 or w.data.ndim != 2 or x.shape[1] != w.shape[0]:
        raise ShapeMismatch(f"linear: {x.shape} x {w.shape}")
    if b is not None and b.shape != (w.shape[1],):
        raise ShapeMismatch(f"linear: bias {b.shape} for output width {w.shape[1]}")
    xd, wd = x.data, w.data
    y = matmul_rows(xd, wd)
    if b is None:
        return _make(y, (x, w), lambda g: (g @ wd.T, xd.T @ g))
    y += b.data
    return _make(y, (x, w, b), lambda g: (g @ wd.T, xd.T @ g, g.sum(axis=0)))


# ---------------------------------------------------------------- segment reductions


class SegmentLayout:
    """Rows grouped by segment id and bucketed by segment size; reusable across calls.

    Each bucket is an index block of shape (segments, size), so reductions
    run over exact (segments, size, k) arrays without padding.
    """

    def __init__(self, seg, n_segments: int):
        seg = np.asarray(seg, dtype=np.intp)
        self.seg = seg
        self.n = n_segments
        counts = np.bincount(seg, minlength=n_segments) if len(seg) else np.zeros(n_segments, np.intp)
        self.counts = counts
        order = np.argsort(seg, kind="stable")
        starts = np.cumsum(counts) - counts
        self.buckets = []
        for c in np.unique(counts[counts > 0]):
            ids = np.flatnonzero(counts == c)
            self.buckets.append((ids, order[starts[ids][:, None] + np.arange(c)]))

    def reduce(self, values: np.ndarray, fn) -> np.ndarray:
        """``fn`` maps a (segments, size, k) block to (segments, k); empty segments stay 0."""
        out = np.zeros((self.n,) + values.shape[1:], dtype=DTYPE)
        for ids, rows in self.buckets:
            out[ids] = fn(values[rows])
        return out


def _sorted_sum(block: np.ndarray) -> np.ndarray:
    # Sorting each column fixes the summation order whatever the row order.
    return np.sort(block, axis=1).sum(axis=1)


def _logsumexp(block: np.ndarray) -> np.ndarray:
    top = block.max(axis=1)
    return top + np.log(_sorted_sum(np.exp(block - top[:, None, :])))


def _layout(seg, n_segments) -> SegmentLayout:
    return seg if isinstance(seg, SegmentLayout) else SegmentLayout(seg, n_segments)


def segment_smoothmax(x: Tensor, seg, n_segments: int) -> Tensor:
    """Componentwise log-sum-exp of the rows of ``x`` within each segment.

    ``seg`` is a segment id per row or a prebuilt :class:`SegmentLayout`.
    Segments without rows yield the zero vector.
    """
    if x.data.ndim != 2:
        raise ShapeMismatch("segment_smoothmax expects a 2-d tensor")
    segs = _layout(seg, n_segments)
    out = segs.reduce(x.data, _logsumexp)
    xd = x.data

    def back(g):
        return (g[segs.seg] * np.exp(xd - out[segs.seg]),)

    return _make(out, (x,), back)


def smoothmax(rows: Tensor) -> Tensor:
    """Componentwise log-sum-exp over the rows of an ``n x k`` tensor."""
    n = rows.shape[0]
    return reshape(segment_smoothmax(rows, np.zeros(n, dtype=np.intp), 1), (rows.shape[1],))


def segment_sum(x: Tensor, seg, n_segments: int) -> Tensor:
    """Sum of the rows of ``x`` within each segment (order independent)."""
    segs = _layout(seg, n_segments)
    out = segs.reduce(x.data, _sorted_sum)
    return _make(out, (x,), lambda g: (g[segs.seg],))


# ---------------------------------------------------------------- parameters


def glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class ParameterSet:
    """Named float64 arrays plus Adam moment buffers."""

    def __init__(self, values: dict[str, np.ndarray] | None = None):
        self.values: dict[str, np.ndarray] = {}
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}
        self.step = 0
        for name, val in (values or {}).items():
            self[name] = val

    def __setitem__(self, name, value):
        value = np.array(value, dtype=DTYPE)
        self.values[name] = value
        self.m[name] = np.zeros_like(value)
        self.v[name] = np.zeros_like(value)

    def __getitem__(self, name):
        return self.values[name]

    def __contains__(self, name):
        return name in self.values

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def size(self) -> int:
        return sum(v.size for v in self.values.values())

    def leaves(self) -> dict[str, Tensor]:
        return {k: Tensor(v, requires_grad=True) for k, v in self.values.items()}

    def copy(self) -> "ParameterSet":
        out = ParameterSet()
        for k in self.values:
            out.values[k] = self.values[k].copy()
            out.m[k] = self.m[k].copy()
            out.v[k] = self.v[k].copy()
        out.step = self.step
        return out

    def equals(self, other: "ParameterSet") -> bool:
        return self.values.keys() == other.values.keys() and all(
            np.array_equal(self.values[k], other.values[k]) for k in self.values
        )

    def to_json(self) -> list:
        return [
            {"name": k, "shape": list(v.shape), "values": " ".join(format(x, ".17g") for x in v.ravel())}
            for k, v in sorted(self.values.items())
        ]

    @classmethod
    def from_json(cls, entries: list) -> "ParameterSet":
        out = cls()
        for e in entries:
            vals = np.array([float(x) for x in e["values"].split()], dtype=DTYPE)
            out[e["name"]] = vals.reshape(e["shape"])
        return out


def adam_step(
    params: ParameterSet,
    grads: dict[str, np.ndarray],
    lr: float = 2e-4,
    betas: tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8,
) -> ParameterSet:
    """One bias-corrected Adam update, in place; parameters without a gradient see zero."""
    for name, g in grads.items():
        if name not in params:
            raise KeyError(f"gradient for unknown parameter {name!r}")
        if np.shape(g) != params[name].shape:
            raise ShapeMismatch(f"gradient for {name}: {np.shape(g)} vs {params[name].shape}")
    b1, b2 = betas
    params.step += 1
    bc1 = 1.0 - b1 ** params.step
    bc2 = 1.0 - b2 ** params.step
    for name in sorted(params.values):
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(params.values[name])
        m = params.m[name] = b1 * params.m[name] + (1.0 - b1) * g
        v = params.v[name] = b2 * params.v[name] + (1.0 - b2) * (g * g)
        params.values[name] = params.values[name] - lr * (m / bc1) / (np.sqrt(v / bc2) + eps)
    return params


def gradients(f: Callable[[dict[str, Tensor]], Tensor], params: ParameterSet) -> tuple[float, dict[str, np.ndarray]]:
    """Value of ``f`` and its gradient with respect to every parameter."""
    leaves = params.leaves()
    out = f(leaves)
    out.backward()
    grads = {k: (t.grad if t.grad is not None else np.zeros_like(t.data)) for k, t in leaves.items()}
    return out.item(), grads


def grad_check(
    f: Callable[[dict[str, Tensor]], Tensor],
    params: ParameterSet,
    step: float = 3e-3,
    samples: int = 100,
    seed: int = 0,
    floor: float = 1e-5,
    richardson: bool = True,
) -> float:
    """Max relative error between reverse-mode and central-difference gradients.

    ``samples`` coordinates are drawn uniformly from all parameters.  The
    relative error is ``|a - n| / max(|a|, |n|, floor)``: below ``floor`` the
    comparison is absolute, because a difference quotient cannot resolve a
    gradient much smaller than ``eps * |f| / step``.  With ``richardson`` the
    central differences at ``step`` and ``step / 2`` are combined to cancel
    the ``step**2`` error term.
    """
    _, grads = gradients(f, params)
    names = sorted(params.values)
    sizes = np.array([params[n].size for n in names])
    rng = np.random.default_rng(seed)
    flat = rng.choice(int(sizes.sum()), size=min(samples, int(sizes.sum())), replace=False)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    worst = 0.0
    for idx in np.sort(flat):
        which = int(np.searchsorted(offsets, idx, side="right") - 1)
        name, local = names[which], int(idx - offsets[which])
        arr = params.values[name].reshape(-1)
        orig = arr[local]

        def at(val):
            arr[local] = val
            return f({k: Tensor(v) for k, v in params.values.items()}).item()

        def central(h):
            return (at(orig + h) - at(orig - h)) / (2.0 * h)

        if richardson:
            numeric = (4.0 * central(step / 2) - central(step)) / 3.0
        else:
            numeric = central(step)
        arr[local] = orig
        analytic = grads[name].reshape(-1)[local]
        err = abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)
        worst = max(worst, err)
    return worst


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


__all__ = [
    "Tensor", "ShapeMismatch", "add", "scale", "mul", "absolute", "mish", "reshape", "concat",
    "gather", "total", "mean", "linear", "SegmentLayout", "segment_smoothmax", "smoothmax", "segment_sum",
    "ParameterSet", "adam_step", "gradients", "grad_check", "glorot",
]
