"""Minimal quaternion and vector math for plane-anchored pose work.

Quaternions are (w, x, y, z) tuples. The plane-local frame is right-handed
with +y along the plane normal; a positive yaw rotates +x toward -z.
"""

from __future__ import annotations

import math

Vec3 = tuple[float, float, float]
Quaternion = tuple[float, float, float, float]

Matrix3 = tuple[Vec3, Vec3, Vec3]


def quat_multiply(a: Quaternion, b: Quaternion) -> Quaternion:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def quat_conjugate(q: Quaternion) -> Quaternion:
    return (q[0], -q[1], -q[2], -q[3])


def quat_normalize(q: Quaternion) -> Quaternion:
    norm = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    if norm == 0.0:
        raise ValueError("cannot normalize a zero quaternion")
    return (q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm)


def quat_from_yaw(angle: float) -> Quaternion:
    """Rotation by `angle` radians about +y."""
    half = angle / 2.0
    return (math.cos(half), 0.0, math.sin(half), 0.0)


def quat_to_matrix(q: Quaternion) -> Matrix3:
    w, x, y, z = q
    return (
        (1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)),
        (2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)),
        (2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)),
    )


def mat_apply(m: Matrix3, v: Vec3) -> Vec3:
    return (
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    )


def quat_rotate(q: Quaternion, v: Vec3) -> Vec3:
    return mat_apply(quat_to_matrix(q), v)


def vec_add(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vec_sub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vec_scale(v: Vec3, s: float) -> Vec3:
    return (v[0] * s, v[1] * s, v[2] * s)


def vec_dot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def vec_norm(v: Vec3) -> float:
    return math.sqrt(vec_dot(v, v))
