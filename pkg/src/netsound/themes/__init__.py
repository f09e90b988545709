"""Builtin theme documents (JSON package data)."""
