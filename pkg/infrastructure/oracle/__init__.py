"""Оракул функции с конечной точностью"""
