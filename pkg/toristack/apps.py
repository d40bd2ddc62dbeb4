from django.apps import AppConfig


class ToristackConfig(AppConfig):
    name = "toristack"
    verbose_name = "Toric DM stacks"
