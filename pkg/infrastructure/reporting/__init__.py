"""CSV-трассы, сводки и графики"""
