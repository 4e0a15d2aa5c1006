"""
SGD with classical momentum and a step learning-rate schedule.
"""
import numpy as np


class MomentumSGD:
    """``v <- momentum * v - lr * g``; ``theta <- theta + v``."""

    def __init__(self, learning_rate, momentum=0.9):
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.velocity = None

    def step(self, parameters, gradient):
        if self.velocity is None:
            self.velocity = np.zeros_like(parameters)
        self.velocity = self.momentum * self.velocity - self.learning_rate * gradient
        return parameters + self.velocity


class StepDecay:
    """Multiply the base rate by ``factor`` every ``period`` epochs."""

    def __init__(self, base_rate, period, factor):
        self.base_rate = base_rate
        self.period = period
        self.factor = factor

    def rate_at(self, epoch):
        return self.base_rate * self.factor ** (epoch // self.period)
