"""工具类模块"""
from .check_utils import *
from .file_utils import *
from .log_utils import *
from .system_utils import *
