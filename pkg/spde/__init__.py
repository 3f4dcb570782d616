"""Núcleo espectral e simulador da equação Φ⁴ perturbada em 𝐓³"""
