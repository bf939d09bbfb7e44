"""Allow ``python -m suqhodge``."""

from .cli import main

main()
