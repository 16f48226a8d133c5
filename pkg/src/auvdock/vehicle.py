"""Vehicle parameter block (BlueROV2 Heavy defaults).

None of these numbers come from a validated identification; they are
order-of-magnitude defaults. Damping is tuned so that full forward thrust
(4 x 35 N at 45 deg, ~99 N) gives a terminal surge speed of ~1 m/s.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .actuation import ThrusterLayout, bluerov2_heavy_layout
from .hydro import HydroParams
from .rigidbody import MassProperties


@dataclass
class VehicleConfig:
    mass: float = 11.5
    inertia: list = field(default_factory=lambda: [0.26, 0.23, 0.37])  # diagonal or full 3x3
    com_offset: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    displaced_volume: float | None = None  # None -> neutrally buoyant
    box_dims: list = field(default_factory=lambda: [0.457, 0.575, 0.254])
    fluid_density: float = 1000.0
    lin_damping: list = field(default_factory=lambda: [4.0, 6.0, 8.0, 0.5, 0.5, 0.5])
    quad_damping: list = field(default_factory=lambda: [95.0, 150.0, 150.0, 2.0, 2.0, 2.0])
    cob_offset: list = field(default_factory=lambda: [0.0, 0.0, 0.02])
    added_mass_coeffs: list = field(default_factory=lambda: [0.1, 1.0 / 256.0])
    disturbance: list = field(default_factory=lambda: [0.0] * 6)
    max_thrust: float = 35.0
    max_rotor_speed: float = 400.0
    reverse_thrust_ratio: float = 1.0
    thruster_positions: list | None = None
    thruster_axes: list | None = None

    def mass_properties(self) -> MassProperties:
        inertia = np.asarray(self.inertia, dtype=float)
        if inertia.shape == (3,):
            inertia = np.diag(inertia)
        volume = self.displaced_volume
        if volume is None:
            volume = self.mass / self.fluid_density if self.fluid_density > 0 else 0.0
        props = MassProperties(float(self.mass), np.asarray(self.com_offset, dtype=float), inertia, float(volume))
        props.validate()
        return props

    def hydro_params(self) -> HydroParams:
        return HydroParams(
            box_dims=self.box_dims,
            fluid_density=float(self.fluid_density),
            lin_damping=self.lin_damping,
            quad_damping=self.quad_damping,
            cob_offset=self.cob_offset,
            added_mass_coeffs=tuple(float(c) for c in self.added_mass_coeffs),
            disturbance=self.disturbance,
        )

    def thruster_layout(self) -> ThrusterLayout:
        base = bluerov2_heavy_layout(self.max_thrust, self.max_rotor_speed)
        positions = base.positions if self.thruster_positions is None else self.thruster_positions
        axes = base.axes if self.thruster_axes is None else self.thruster_axes
        return ThrusterLayout(
            positions=positions,
            axes=axes,
            max_rotor_speed=base.max_rotor_speed,
            thrust_coeff=base.thrust_coeff,
            reverse_thrust_coeff=base.thrust_coeff * self.reverse_thrust_ratio,
        )
