from pydantic import BaseSettings


class Settings(BaseSettings):
    # https://pydantic-docs.helpmanual.io/usage/settings/

    TOL_POS: float = 1e-12  # entries of a behavior may undershoot zero by this much
    TOL_NORM: float = 1e-9
    TOL_NO_SIGNALING: float = 1e-9
    TOL_TIGHT: float = 1e-9  # h·v = c for spanning vertices
    TOL_SOUNDNESS: float = 1e-8  # h·v <= c for separating inequalities
    TOL_SEP: float = 1e-7  # LP optimum below this means the behavior is local
    LP_DUALITY_GAP: float = 1e-8
    MAX_VERTICES: int = 10 ** 7

    SDP_SOLVER: str = 'CLARABEL'
    SDP_INFEASIBILITY_GAP: float = 1e-5
    Q2_SLACK: float = 1e-7
    TRIVIAL_GUESS_TOL: float = 1e-6

    N_WORKERS: int = 1
    INFERENCE_DTYPE: str = 'float32'  # parameter copies used by Network.predict
    COMPRESS_HDF5: bool = True

    class Config:
        env_prefix = 'bellguess_'
        env_file = ".env"

    @property
    def hdf5_compress_args(self):
        if self.COMPRESS_HDF5:
            return dict(compression='gzip', compression_opts=9)
        else:
            return {}


class SettingsGetter:
    def __init__(self, **kwargs):
        self.settings = Settings(**kwargs)

    def set(self, **kwargs):
        for k, v in kwargs.items():
            if v is not None:
                setattr(self.settings, k, v)

    def __call__(self, *args, **kwargs) -> Settings:
        return self.settings


get_settings = SettingsGetter()
