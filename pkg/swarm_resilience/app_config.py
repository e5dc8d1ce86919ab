import configparser
import os
from pathlib import Path
from typing import Optional

SETTINGS_ENV_VAR = "SWARM_RESILIENCE_SETTINGS"
OUTPUT_DIR_ENV_VAR = "SWARM_RESILIENCE_OUT"


class AppConfig:
    """
    Centralized application settings.

    Reads the packaged default INI, then an optional user INI named by the
    SWARM_RESILIENCE_SETTINGS environment variable on top of it.
    """

    _instance: Optional["AppConfig"] = None

    def __new__(cls) -> "AppConfig":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._initialize()
        return cls._instance

    def _initialize(self) -> None:
        """Initialize the configuration system."""
        self.config_dir = Path(__file__).resolve().parent / "config"
        self.default_config_file: Path = (
            self.config_dir / "default.application_settings.ini"
        )
        if not self.default_config_file.is_file():
            raise FileNotFoundError(
                f"The default configuration file was not found at {self.default_config_file}"
            )
        self.config: configparser.ConfigParser = configparser.ConfigParser()
        files = [self.default_config_file]
        override = os.environ.get(SETTINGS_ENV_VAR)
        if override:
            files.append(Path(override))
        self.loaded_files = self.config.read(files)

    @classmethod
    def reset(cls) -> None:
        """Drop the cached instance so the next access re-reads settings."""
        cls._instance = None

    def get(
        self, section: str, key: str, fallback: Optional[str] = None
    ) -> Optional[str]:
        """
        Get a string value from the configuration.

        Args:
            section: Section name in config.
            key: Setting name.
            fallback: Default value if setting doesn't exist.

        Returns:
            The setting value or fallback.
        """
        return self.config.get(section, key, fallback=fallback)

    def get_bool(self, section: str, key: str, fallback: bool = False) -> bool:
        """Get a boolean value from the configuration."""
        return self.config.getboolean(section, key, fallback=fallback)

    def get_int(self, section: str, key: str, fallback: int = 0) -> int:
        """Get an integer value from the configuration."""
        return self.config.getint(section, key, fallback=fallback)

    def get_path(self, key: str) -> Path:
        """
        Get a path from the [Paths] section of the config.
        Relative paths resolve against the current working directory.

        Args:
            key: The path key to retrieve from the [Paths] section.

        Returns:
            A Path object.

        Raises:
            KeyError: If the key is missing or empty.
        """
        value = self.config.get("Paths", key, fallback="")
        if not value:
            raise KeyError(
                f"Path key '{key}' not found or is empty in the [Paths] section."
            )
        return Path(value)

    def output_dir(self) -> Path:
        """Default output directory; the SWARM_RESILIENCE_OUT variable wins."""
        env_value = os.environ.get(OUTPUT_DIR_ENV_VAR)
        if env_value:
            return Path(env_value)
        return self.get_path("output_dir")


def get_app_config() -> AppConfig:
    return AppConfig()
