"""
Tests for the Error Handler module.
""" 