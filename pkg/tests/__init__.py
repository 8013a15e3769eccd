"""Tests for the application"""