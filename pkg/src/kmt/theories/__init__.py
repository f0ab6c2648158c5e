"""Built-in theories; importing this package registers them."""
from .bitvec import BitVec
from .incnat import IncNat
from .prod import Prod
from .sets import SetTheory
from .maps import MapTheory
from .ltlf import LTLf
from .netkat import NetKAT
from .sp import SP

__all__ = ["BitVec", "IncNat", "Prod", "SetTheory", "MapTheory", "LTLf", "NetKAT", "SP"]
