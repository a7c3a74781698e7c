"""Dependency Injection контейнер"""

