"""
Structural operations on labeled states and operators.

Factor permutations are realized by reshaping to one axis per factor and
transposing, so every subsystem manipulation is an explicit index map.
"""

import logging
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from decoupling_lab.tensor.linalg import check_budget
from decoupling_lab.tensor.spaces import TensorSpace
from decoupling_lab.tensor.states import DensityOperator, LinearOp, StateVector
from decoupling_lab.utils.error_handler import SpaceMismatchError, ValidationError

logger = logging.getLogger(__name__)

State = Union[StateVector, DensityOperator]


def tensor(a, b):
    """Kronecker product on concatenated factor lists.

    Raises:
        SpaceMismatchError: On mixed kinds or a label collision
    """
    if type(a) is not type(b):
        raise SpaceMismatchError(f"Cannot tensor {type(a).__name__} with {type(b).__name__}")
    if isinstance(a, StateVector):
        return StateVector(
            a.space.concat(b.space),
            np.kron(a.amplitudes, b.amplitudes),
            subnormalized=a.subnormalized or b.subnormalized,
        )
    if isinstance(a, DensityOperator):
        space = a.space.concat(b.space)
        check_budget("tensor product", space.total_dim ** 2)
        return DensityOperator(
            space,
            np.kron(a.matrix, b.matrix),
            subnormalized=a.subnormalized or b.subnormalized,
            check_positive=False,
            check_trace=a.check_trace and b.check_trace,
        )
    if isinstance(a, LinearOp):
        in_space = a.in_space.concat(b.in_space)
        out_space = a.out_space.concat(b.out_space)
        check_budget("tensor product", in_space.total_dim * out_space.total_dim)
        return LinearOp(in_space, out_space, np.kron(a.matrix, b.matrix), isometry=a.isometry and b.isometry)
    raise SpaceMismatchError(f"Unsupported kind {type(a).__name__}")


def tensor_all(items: Sequence):
    result = items[0]
    for item in items[1:]:
        result = tensor(result, item)
    return result


def partial_trace(state: State, discard: Iterable[str]) -> DensityOperator:
    """Trace out the ``discard`` factors.

    Raises:
        SpaceMismatchError: If a label is unknown
    """
    discard = list(dict.fromkeys(discard))
    for label in discard:
        state.space.index(label)
    keep = [label for label in state.space.labels if label not in discard]
    kept_space = state.space.sub(keep)
    d_keep = kept_space.total_dim
    d_discard = state.space.sub(discard).total_dim

    if isinstance(state, StateVector):
        matrix = reorder(state, keep + discard).amplitudes.reshape(d_keep, d_discard)
        reduced = matrix @ matrix.conj().T
        return DensityOperator(kept_space, reduced, subnormalized=state.subnormalized, check_positive=False)

    ordered = reorder(state, keep + discard).matrix.reshape(d_keep, d_discard, d_keep, d_discard)
    reduced = np.einsum('idjd->ij', ordered)
    return DensityOperator(
        kept_space,
        reduced,
        subnormalized=state.subnormalized,
        check_positive=False,
        check_trace=state.check_trace,
    )


def marginal(state: State, keep: Sequence[str]) -> DensityOperator:
    """Reduced state on ``keep``, in the order given."""
    for label in keep:
        state.space.index(label)
    reduced = partial_trace(state, [label for label in state.space.labels if label not in keep])
    return reorder(reduced, list(keep))


def reorder(obj, labels: Sequence[str]):
    """Permute the factors of a state into ``labels`` order."""
    if isinstance(obj, LinearOp):
        raise SpaceMismatchError("Use reorder_op for linear operators")
    labels = list(labels)
    if tuple(labels) == obj.space.labels:
        return obj
    perm = obj.space.permutation(labels)
    new_space = obj.space.sub(labels)
    dims = obj.space.dims
    if isinstance(obj, StateVector):
        amplitudes = obj.amplitudes.reshape(dims).transpose(perm).ravel()
        return StateVector(new_space, amplitudes, subnormalized=obj.subnormalized)
    n = len(dims)
    axes = list(perm) + [n + p for p in perm]
    matrix = obj.matrix.reshape(dims + dims).transpose(axes).reshape(obj.dim, obj.dim)
    return DensityOperator(
        new_space,
        matrix,
        subnormalized=obj.subnormalized,
        check_positive=False,
        check_trace=obj.check_trace,
    )


def reorder_op(op: LinearOp, in_labels: Sequence[str] = None, out_labels: Sequence[str] = None) -> LinearOp:
    """Permute the input and/or output factors of an operator."""
    in_labels = list(in_labels or op.in_space.labels)
    out_labels = list(out_labels or op.out_space.labels)
    in_perm = op.in_space.permutation(in_labels)
    out_perm = op.out_space.permutation(out_labels)
    n_out = len(out_perm)
    tensor_ = op.matrix.reshape(op.out_space.dims + op.in_space.dims)
    axes = list(out_perm) + [n_out + p for p in in_perm]
    matrix = tensor_.transpose(axes).reshape(op.matrix.shape)
    return LinearOp(op.in_space.sub(in_labels), op.out_space.sub(out_labels), matrix, isometry=op.isometry)


def relabel(obj, mapping: Dict[str, str]):
    """Rename factors without touching the data."""
    if isinstance(obj, LinearOp):
        in_map = {k: v for k, v in mapping.items() if k in obj.in_space}
        out_map = {k: v for k, v in mapping.items() if k in obj.out_space}
        if set(mapping) - set(in_map) - set(out_map):
            raise SpaceMismatchError(f"Unknown labels {sorted(set(mapping) - set(in_map) - set(out_map))}")
        return LinearOp(
            obj.in_space.relabel(in_map),
            obj.out_space.relabel(out_map),
            obj.matrix,
            isometry=obj.isometry,
            name=obj.name,
        )
    if isinstance(obj, StateVector):
        return StateVector(obj.space.relabel(mapping), obj.amplitudes, subnormalized=obj.subnormalized)
    return DensityOperator(
        obj.space.relabel(mapping),
        obj.matrix,
        subnormalized=obj.subnormalized,
        check_positive=False,
        check_trace=obj.check_trace,
    )


def fuse(obj: State, labels: Sequence[str], new_label: str) -> State:
    """Merge ``labels`` (in that order) into one factor placed where the first one was."""
    labels = list(labels)
    if not labels:
        raise ValidationError("Nothing to fuse")
    position = min(obj.space.index(label) for label in labels)
    rest = [label for label in obj.space.labels if label not in labels]
    before = [label for label in rest if obj.space.index(label) < position]
    after = [label for label in rest if obj.space.index(label) > position]
    ordered = reorder(obj, before + labels + after)
    fused_dim = obj.space.sub(labels).total_dim
    factors = (
        tuple((label, obj.space.dim(label)) for label in before)
        + ((new_label, fused_dim),)
        + tuple((label, obj.space.dim(label)) for label in after)
    )
    new_space = TensorSpace(factors)
    if isinstance(obj, StateVector):
        return StateVector(new_space, ordered.amplitudes, subnormalized=obj.subnormalized)
    return DensityOperator(
        new_space,
        ordered.matrix,
        subnormalized=obj.subnormalized,
        check_positive=False,
        check_trace=obj.check_trace,
    )


def _contract(array: np.ndarray, names: List, targets: List, matrix: np.ndarray,
              out_names: List, out_dims: Tuple[int, ...]) -> Tuple[np.ndarray, List]:
    """Contract the ``targets`` axes of ``array`` with ``matrix`` (out x in).

    The new axes are placed first; the remaining axes keep their order.
    """
    axes = [names.index(name) for name in targets]
    moved = np.moveaxis(array, axes, list(range(len(axes))))
    rest_shape = moved.shape[len(axes):]
    result = matrix @ moved.reshape(matrix.shape[1], -1)
    rest_names = [name for name in names if name not in targets]
    return result.reshape(tuple(out_dims) + rest_shape), list(out_names) + rest_names


def apply_local(state: State, op: LinearOp) -> State:
    """Apply ``op`` to the factors named by its input space.

    Output factors take the position of the first consumed factor. A
    non-isometric operator yields a subnormalized result.

    Raises:
        SpaceMismatchError: If an input factor is missing or an output label collides
    """
    in_labels = list(op.in_space.labels)
    for label in in_labels:
        if state.space.dim(label) != op.in_space.dim(label):
            raise SpaceMismatchError(f"Factor {label!r} has dimension {state.space.dim(label)}, "
                                     f"operator expects {op.in_space.dim(label)}")
    rest = [label for label in state.space.labels if label not in in_labels]
    out_labels = list(op.out_space.labels)
    collision = set(rest) & set(out_labels)
    if collision:
        raise SpaceMismatchError(f"Output labels {sorted(collision)} collide with untouched factors")

    position = min(state.space.index(label) for label in in_labels)
    before = [label for label in rest if state.space.index(label) < position]
    after = [label for label in rest if state.space.index(label) > position]
    target_labels = before + out_labels + after
    new_space = TensorSpace(
        tuple((label, state.space.dim(label)) for label in before)
        + op.out_space.factors
        + tuple((label, state.space.dim(label)) for label in after)
    )
    out_dims = op.out_space.dims
    subnormalized = state.subnormalized or not op.isometry

    if isinstance(state, StateVector):
        array, names = _contract(
            state.as_tensor(), list(state.space.labels), in_labels, op.matrix, out_labels, out_dims
        )
        array = array.transpose([names.index(label) for label in target_labels])
        return StateVector(new_space, array.ravel(), subnormalized=subnormalized)

    check_budget("local operator application", new_space.total_dim ** 2)
    labels = list(state.space.labels)
    names = [('r', label) for label in labels] + [('c', label) for label in labels]
    array = state.matrix.reshape(state.space.dims * 2)
    array, names = _contract(array, names, [('r', label) for label in in_labels], op.matrix,
                             [('r', label) for label in out_labels], out_dims)
    array, names = _contract(array, names, [('c', label) for label in in_labels], op.matrix.conj(),
                             [('c', label) for label in out_labels], out_dims)
    order = [names.index(('r', label)) for label in target_labels]
    order += [names.index(('c', label)) for label in target_labels]
    d = new_space.total_dim
    return DensityOperator(
        new_space,
        array.transpose(order).reshape(d, d),
        subnormalized=subnormalized,
        check_positive=False,
        check_trace=state.check_trace,
    )
