from .config_tools import Config

config: Config = Config.load()
