"""
PromptLint Library
Analyse statique, lint et statistiques de corpus pour templates de prompts LLM
"""

__version__ = "1.0.0"
