__all__ = ['BellGuessError', 'CapacityError', 'InvalidBehaviorError', 'UnsupportedScenarioError', 'InvariantError',
           'TrivialInequalityError', 'DimensionMismatchError', 'SolverError', 'GenerationAbortedError',
           'TrainingDivergedError', 'PipelineStageError']


class BellGuessError(Exception):
    pass


class CapacityError(BellGuessError, ValueError):
    def __init__(self, what, size, limit):
        super().__init__(f'Refusing to materialize {size} {what}; the limit is {limit} (setting MAX_VERTICES).')
        self.size = size
        self.limit = limit


class InvalidBehaviorError(BellGuessError, ValueError):
    pass


class UnsupportedScenarioError(BellGuessError, ValueError):
    def __init__(self, scenario, reason):
        super().__init__(f'Scenario {scenario} is not supported: {reason}')


class InvariantError(BellGuessError, ValueError):
    pass


class TrivialInequalityError(InvariantError):
    def __init__(self):
        super().__init__('The inequality is satisfied by every normalized non-negative behavior '
                         '(e.g. a positivity constraint) and has no PR box.')


class DimensionMismatchError(BellGuessError, ValueError):
    def __init__(self, what, expected, actual):
        super().__init__(f'{what} has length {actual}, expected {expected}.')


class SolverError(BellGuessError, RuntimeError):
    pass


class GenerationAbortedError(BellGuessError, RuntimeError):
    def __init__(self, failures, attempts, limit):
        super().__init__(f'Dataset generation aborted: {failures} solver failures in {attempts} attempts '
                         f'exceed the tolerated rate of {limit:.0%}.')
        self.failures = failures
        self.attempts = attempts


class TrainingDivergedError(BellGuessError, FloatingPointError):
    def __init__(self, epoch, batch):
        super().__init__(f'Loss became NaN/inf in epoch {epoch}, batch {batch}. Lower the learning rate or check the '
                         f'targets for non-finite values.')


class PipelineStageError(BellGuessError, RuntimeError):
    def __init__(self, stage, manifest):
        super().__init__(f'Pipeline stage `{stage}` failed. Artifacts written so far: {sorted(manifest)}')
        self.stage = stage
        self.manifest = manifest
