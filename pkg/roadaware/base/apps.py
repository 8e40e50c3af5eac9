# -*- coding: utf-8 -*-

from django.apps import AppConfig


class BaseAppConfig(AppConfig):
    name = "roadaware.base"
    verbose_name = "Road-aware localization base"
