"""
Test suite for the satellite TCP/ATM simulator
"""
