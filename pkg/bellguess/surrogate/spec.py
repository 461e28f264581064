from typing import List, Sequence

from pydantic import BaseModel, conint, validator

from ..enums import Activation, ModelKind
from ..scenario import Scenario

__all__ = ['LayerSpec', 'NetworkSpec', 'DEFAULT_TRUNK', 'DEFAULT_BRANCHED_TRUNK', 'DEFAULT_BRANCH']

DEFAULT_TRUNK = (256, 256, 128)
DEFAULT_BRANCHED_TRUNK = (256, 256)
DEFAULT_BRANCH = (128, 64)


class LayerSpec(BaseModel):
    width: conint(ge=1)
    activation: Activation = Activation.RELU


class NetworkSpec(BaseModel):
    """
    Dense network: a shared trunk followed by one or more heads. The output is the concatenation of the head
    outputs; for the joint models the m²k² Bell coefficients come first and the guessing probability last.
    """
    kind: ModelKind
    input_width: conint(ge=1)
    trunk: List[LayerSpec]
    heads: List[List[LayerSpec]]

    @validator('heads')
    def check_heads(cls, v):
        if not v or any(len(head) == 0 for head in v):
            raise ValueError('every head needs at least its output layer')
        return v

    @property
    def output_width(self) -> int:
        return sum(head[-1].width for head in self.heads)

    @classmethod
    def for_model(cls, kind: ModelKind, scenario: Scenario, trunk: Sequence[int] = None,
                  branch: Sequence[int] = None) -> 'NetworkSpec':
        """Default architectures of the guessing-probability regressor and the two joint predictors."""
        kind = ModelKind(kind)
        dim = scenario.dim
        if kind is ModelKind.NN2:
            trunk = DEFAULT_BRANCHED_TRUNK if trunk is None else trunk
            branch = DEFAULT_BRANCH if branch is None else branch
            hidden = [LayerSpec(width=w) for w in branch]
            heads = [hidden + [LayerSpec(width=dim, activation=Activation.LINEAR)],
                     hidden + [LayerSpec(width=1, activation=Activation.SIGMOID)]]
        elif kind is ModelKind.NN1:
            heads = [[LayerSpec(width=dim + 1, activation=Activation.LINEAR_SIGMOID)]]
        else:
            heads = [[LayerSpec(width=1, activation=Activation.SIGMOID)]]
        trunk = DEFAULT_TRUNK if trunk is None else trunk
        return cls(kind=kind, input_width=dim, trunk=[LayerSpec(width=w) for w in trunk], heads=heads)
