# -*- coding: utf-8 -*-

default_app_config = "roadaware.base.apps.BaseAppConfig"
