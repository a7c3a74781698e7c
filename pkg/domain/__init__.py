"""Доменные модели и интерфейсы"""

