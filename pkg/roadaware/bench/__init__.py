# -*- coding: utf-8 -*-

default_app_config = "roadaware.bench.apps.BenchAppConfig"
