from winsumm.tensor.core import (
    ShapeError, Tape, Tensor, active_tape, add, backward, clip, concat, dot, embedding_lookup, getitem,
    log, matmul, mean, mul, parameter, relu, reshape, scalar_mul, sigmoid, softmax, stack, sum, tanh,
    transpose,
)
from winsumm.tensor.gradcheck import grad_check, grad_check_report, relative_error
from winsumm.tensor.lstm import bilstm, init_lstm, lstm, lstm_step
from winsumm.tensor.optim import AdaDeltaState, adadelta_step, clip_grad_norm, zero_grad

__all__ = [
    "ShapeError", "Tape", "Tensor", "active_tape", "add", "backward", "clip", "concat", "dot",
    "embedding_lookup", "getitem", "log", "matmul", "mean", "mul", "parameter", "relu", "reshape",
    "scalar_mul", "sigmoid", "softmax", "stack", "sum", "tanh", "transpose", "grad_check",
    "grad_check_report", "relative_error", "bilstm", "init_lstm", "lstm", "lstm_step",
    "AdaDeltaState", "adadelta_step", "clip_grad_norm", "zero_grad",
]
