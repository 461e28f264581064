from .pydantic_config import PydanticConfig, FrozenConfig, readonly

__all__ = ['PydanticConfig', 'FrozenConfig', 'readonly']
