from .config import build_config, env_defaults, load_config_file, LOG_LEVEL, TOOL_NAME, VERSION

__all__ = ['build_config', 'env_defaults', 'load_config_file', 'LOG_LEVEL', 'TOOL_NAME', 'VERSION']
