#!/usr/bin/env python3
"""
PromptLint - analyse statique de templates de prompts LLM

Usage : python3 promptlint.py <lint|analyze|ingest|eval|explain> ...
"""
import sys

from lib.cli import main

if __name__ == '__main__':
    sys.exit(main())
