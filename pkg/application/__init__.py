"""Слой приложения (сервисы, use cases)"""

