from .pool import PoolSettings, map_paths

__all__ = ["PoolSettings", "map_paths"]
