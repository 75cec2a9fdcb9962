"""Pollution-routing solver with joint speed and depot-departure optimization."""

from .model import (FIXED, FREE, InputError, Instance, Node, PrpParameters, Route, Schedule,
                    Solution, arc_fuel, arc_load, distance, route_cost, validate)
from .sdtoa import SpeedOptResult, sdtoa, soa, v_star_fuel, v_star_fuel_driver

__version__ = "0.1.0"
