# -*- coding: utf-8 -*-

from .common import *

DEBUG = True

LOGGING["loggers"]["roadaware"]["level"] = "INFO"
