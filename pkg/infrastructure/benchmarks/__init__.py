"""Тестовые функции глобальной оптимизации"""
