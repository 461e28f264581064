from enum import Enum


class _CaseInsensitive(str, Enum):

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            for member in cls:
                if member.value.lower() == value.lower() or member.name.lower() == value.lower():
                    return member
        return super()._missing_(value)


class FacetClass(_CaseInsensitive):
    CHSH = 'CHSH'
    I3322 = 'I3322'


class LpStatus(_CaseInsensitive):
    OPTIMAL = 'optimal'
    LOCAL_BEHAVIOR = 'local_behavior'
    INFEASIBLE = 'infeasible'
    NUMERICAL_FAILURE = 'numerical_failure'


class SdpStatus(_CaseInsensitive):
    OPTIMAL = 'optimal'
    OPTIMAL_INACCURATE = 'optimal_inaccurate'
    INFEASIBLE = 'infeasible'
    SOLVER_FAILURE = 'solver_failure'

    @property
    def solved(self):
        return self in (SdpStatus.OPTIMAL, SdpStatus.OPTIMAL_INACCURATE)


class Activation(_CaseInsensitive):
    RELU = 'relu'
    SIGMOID = 'sigmoid'
    LINEAR = 'linear'
    # linear on every neuron except the last one, which is a sigmoid
    LINEAR_SIGMOID = 'linear_sigmoid'


class ModelKind(_CaseInsensitive):
    PGUESS = 'pguess'
    NN1 = 'nn1'
    NN2 = 'nn2'

    @property
    def predicts_inequality(self):
        return self is not ModelKind.PGUESS


class RejectReason(_CaseInsensitive):
    NOT_Q2 = 'not_q2'
    LOCAL = 'local'
    INFEASIBLE = 'infeasible'
    TRIVIAL_GUESS = 'trivial_guess'
    SOLVER_FAILURE = 'solver_failure'


class ScheduleVariant(_CaseInsensitive):
    # lr <- 0.1 lr at epochs 60, 70, 80, 90, 100
    EVERY_TENTH = 'every_tenth'
    # lr <- 0.1 lr at epochs 51, 61, 71, 81, 91
    AFTER_FIFTY = 'after_fifty'
