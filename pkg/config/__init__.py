"""Конфигурация приложения"""

