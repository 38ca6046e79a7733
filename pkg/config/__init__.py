"""配置管理模块"""
from .settings import *
from .constants import *
