"""Сервисы приложения"""

