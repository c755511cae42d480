from .extract_settings import APP_SETTINGS, load_config
