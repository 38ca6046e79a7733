"""环面量子化与耦合猫映射"""
from .errors import *
from .hilbert import *
from .catmap import *
from .states import *
from .entropy import *
from .otoc import *
from .wigner import *
from .classical import *
