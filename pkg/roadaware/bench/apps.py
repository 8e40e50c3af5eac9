# -*- coding: utf-8 -*-

from django.apps import AppConfig


class BenchAppConfig(AppConfig):
    name = "roadaware.bench"
    verbose_name = "Localization benchmark"
