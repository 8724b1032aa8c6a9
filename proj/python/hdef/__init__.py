from ._hdef import Session, check_conventions, commands, run

__all__ = ["Session", "check_conventions", "commands", "run"]
