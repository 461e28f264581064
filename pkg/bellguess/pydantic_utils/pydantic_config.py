import numpy as np


class PydanticConfig:
    arbitrary_types_allowed = True
    copy_on_model_validation = 'none'


class FrozenConfig(PydanticConfig):
    """Models carrying numpy arrays that must not change after validation."""
    frozen = True


def readonly(array, dtype=np.float64) -> np.ndarray:
    """Returns a contiguous copy of `array` with the writeable flag cleared."""
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out
