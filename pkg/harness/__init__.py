"""实验框架：场景配置、时间序列运行、图数据、检验与扫描"""
from .scenario import *
from .runner import *
from .figures import *
from .verify import *
from .sweep import *
