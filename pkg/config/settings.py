from pathlib import Path

from easy_env_var import env

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = env("SECRET_KEY", default="toristack-local-only")

DEBUG = env("DEBUG", expected_type=bool, default=False)

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    # Third-party
    "rest_framework",
    # Local
    "toristack.apps.ToristackConfig",
]

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {},
    },
]

# Nothing is persisted.
DATABASES = {}

# Machine reports: compact separators, non-ASCII kept, NaN refused.
REST_FRAMEWORK = {
    "UNICODE_JSON": True,
    "COMPACT_JSON": True,
    "STRICT_JSON": True,
}

TORISTACK = {
    "MAX_RAYS": env("TORISTACK_MAX_RAYS", expected_type=int, default=30),
    "JOBS": env("TORISTACK_JOBS", expected_type=int, default=1),
    "LEVEL_CONVENTION": env(
        "TORISTACK_LEVEL_CONVENTION", default="weighted"
    ),
    "COMPLETENESS_MAX_DIM": 3,
}

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {
            "format": "{levelname} {name} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "loggers": {
        "toristack": {
            "handlers": ["console"],
            "level": env("TORISTACK_LOG_LEVEL", default="WARNING"),
            "propagate": False,
        },
    },
}

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True
