"""Portable binary snapshots of a full solution state.

Layout (all little-endian regardless of host):
  bytes 0-3   magic "KTRB"
  uint32      format version (currently 1)
  uint32 x3   N1, N2, N3
  float64 x3  L1, L2, L3
  float64     t
  float64 x6  nu0, kappa1, kappa2, kappa3, kappa4, momentum_diffusion_coeff
  float64     v1, v2, v3, omega, b arrays, each N1*N2*N3 row-major
"""

import struct

import numpy as np

from ..dynamics import ModelParams, State
from ..errors import ConfigError
from ..fields import ScalarField, VectorField
from ..grid import TorusGrid

MAGIC = b"KTRB"
VERSION = 1


def write_snapshot(path, state: State, params: ModelParams):
    g = state.grid
    header = MAGIC + struct.pack(
        "<IIII", VERSION, *g.resolution)
    header += struct.pack("<3d", *g.lengths)
    header += struct.pack("<d", state.t)
    header += struct.pack(
        "<6d", params.nu0, params.kappa1, params.kappa2, params.kappa3,
        params.kappa4, params.momentum_diffusion_coeff)
    with open(path, "wb") as fh:
        fh.write(header)
        for arr in (*state.v.values, state.omega.values, state.b.values):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def read_snapshot(path):
    """Returns (State, ModelParams)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != MAGIC:
        raise ConfigError(f"{path}: not a snapshot file (bad magic)")
    if len(raw) < 100:
        raise ConfigError(f"{path}: truncated snapshot header")
    version, n1, n2, n3 = struct.unpack_from("<IIII", raw, 4)
    if version != VERSION:
        raise ConfigError(f"{path}: unsupported snapshot version {version}")
    off = 20
    l1, l2, l3 = struct.unpack_from("<3d", raw, off)
    off += 24
    (t,) = struct.unpack_from("<d", raw, off)
    off += 8
    pvals = struct.unpack_from("<6d", raw, off)
    off += 48
    grid = TorusGrid(lengths=(l1, l2, l3), resolution=(n1, n2, n3))
    count = grid.npoints
    if len(raw) < off + 5 * 8 * count:
        raise ConfigError(f"{path}: truncated field data")
    fields = []
    for _ in range(5):
        arr = np.frombuffer(raw, dtype="<f8", count=count, offset=off)
        off += 8 * count
        fields.append(arr.astype(float).reshape(grid.resolution))
    if off != len(raw):
        raise ConfigError(f"{path}: trailing bytes after field data")
    params = ModelParams(nu0=pvals[0], kappa1=pvals[1], kappa2=pvals[2],
                         kappa3=pvals[3], kappa4=pvals[4],
                         momentum_diffusion_coeff=pvals[5])
    state = State(
        v=VectorField(grid, np.stack(fields[:3])),
        omega=ScalarField(grid, fields[3]),
        b=ScalarField(grid, fields[4]),
        t=t,
    )
    return state, params
