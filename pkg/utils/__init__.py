"""Pacote de utilitários"""
