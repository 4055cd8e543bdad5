"""covcert - 平面曲线协变量的精确计算与满秩证书"""

__version__ = "0.1.0"
