"""Инфраструктурный слой: оракул, тестовые функции, отчёты, контейнер зависимостей"""
