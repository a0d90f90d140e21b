"""quantikit：有限 quantaloid 及其豐化範疇的計算工具"""

__version__ = "0.1.0"
