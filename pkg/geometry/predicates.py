"""
Точные адаптивные предикаты: orient2d, orient3d, incircle, insphere.

Сначала вычисление в double со статической оценкой ошибки; если знак
не гарантирован — пересчёт в рациональной арифметике (Fraction).
Вырожденные случаи incircle/insphere разрешаются символическим возмущением
(simulation of simplicity): подъём |x|^2 точки с глобальным индексом i
увеличивается на δ_i, причём δ_i >> δ_j при i < j.
"""

from fractions import Fraction

import numpy as np

EPS = np.finfo(float).eps / 2.0

ORIENT2D_BOUND = (3.0 + 16.0 * EPS) * EPS
ORIENT3D_BOUND = (7.0 + 56.0 * EPS) * EPS
INCIRCLE_BOUND = (10.0 + 96.0 * EPS) * EPS
INSPHERE_BOUND = (16.0 + 224.0 * EPS) * EPS


def _sign(value) -> int:
    return int(value > 0) - int(value < 0)


def _det(rows) -> Fraction:
    """Определитель малой матрицы (разложение по первой строке)."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = Fraction(0)
    for j in range(n):
        if rows[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        term = rows[0][j] * _det(minor)
        total += term if j % 2 == 0 else -term
    return total


def _exact(points) -> list[list[Fraction]]:
    return [[Fraction(float(c)) for c in p] for p in points]


# ======================== orient ========================

def orient2d(a, b, c) -> int:
    """+1, если a, b, c идут против часовой стрелки; 0 — коллинеарны."""
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    if abs(det) > ORIENT2D_BOUND * (abs(detleft) + abs(detright)):
        return _sign(det)
    return orient2d_exact(a, b, c)


def orient2d_exact(a, b, c) -> int:
    a, b, c = _exact((a, b, c))
    return _sign((a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0]))


def orient3d(a, b, c, d) -> int:
    """Знак det[a-d; b-d; c-d] (положителен, если d ниже плоскости abc, обход abc против часовой сверху)."""
    m = np.array([np.subtract(a, d), np.subtract(b, d), np.subtract(c, d)], dtype=float)
    det = _det3(m)
    if abs(det) > ORIENT3D_BOUND * _permanent3(np.abs(m)):
        return _sign(det)
    return orient3d_exact(a, b, c, d)


def orient3d_exact(a, b, c, d) -> int:
    a, b, c, d = _exact((a, b, c, d))
    rows = [[x - y for x, y in zip(p, d)] for p in (a, b, c)]
    return _sign(_det(rows))


def _det3(m: np.ndarray) -> float:
    return float(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def _permanent3(m: np.ndarray) -> float:
    return float(
        m[0, 0] * (m[1, 1] * m[2, 2] + m[1, 2] * m[2, 1])
        + m[0, 1] * (m[1, 0] * m[2, 2] + m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] + m[1, 1] * m[2, 0])
    )


# ======================== incircle / insphere ========================

def incircle_float(a, b, c, d) -> tuple[np.ndarray, np.ndarray]:
    """Векторная версия: значение определителя и оценка его ошибки (массивы формы (m,))."""
    a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
    adx, ady = a[..., 0] - d[..., 0], a[..., 1] - d[..., 1]
    bdx, bdy = b[..., 0] - d[..., 0], b[..., 1] - d[..., 1]
    cdx, cdy = c[..., 0] - d[..., 0], c[..., 1] - d[..., 1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    permanent = ((np.abs(bdx * cdy) + np.abs(cdx * bdy)) * alift
                 + (np.abs(cdx * ady) + np.abs(adx * cdy)) * blift
                 + (np.abs(adx * bdy) + np.abs(bdx * ady)) * clift)
    return det, INCIRCLE_BOUND * permanent


def incircle(a, b, c, d) -> int:
    """+1, если d строго внутри окружности через a, b, c (обход против часовой)."""
    det, err = incircle_float(a, b, c, d)
    if abs(float(det)) > float(err):
        return _sign(float(det))
    return _lifted_sign(_exact((a, b, c, d)))


def insphere_float(a, b, c, d, e) -> tuple[float, float]:
    rows = np.array([np.subtract(p, e) for p in (a, b, c, d)], dtype=float)
    lifts = np.sum(rows * rows, axis=1)
    det = 0.0
    permanent = 0.0
    for i in range(4):
        minor = np.delete(rows, i, axis=0)
        sign = -1.0 if i % 2 == 0 else 1.0
        det += sign * lifts[i] * _det3(minor)
        permanent += lifts[i] * _permanent3(np.abs(minor))
    return det, INSPHERE_BOUND * permanent


def insphere(a, b, c, d, e) -> int:
    """+1, если e строго внутри сферы через a, b, c, d при orient3d(a,b,c,d) > 0."""
    det, err = insphere_float(a, b, c, d, e)
    if abs(det) > err:
        return _sign(det)
    return _lifted_sign(_exact((a, b, c, d, e)))


def _lifted_sign(points: list[list[Fraction]]) -> int:
    """Знак det[x, |x|^2, 1] по строкам в заданном порядке (точно)."""
    rows = [p + [sum(c * c for c in p), Fraction(1)] for p in points]
    return _sign(_det(rows))


# ======================== Simulation of simplicity ========================

def lifted_sign_sos(points, indices) -> int:
    """
    Знак возмущённого det[x, |x|^2 + δ, 1].

    Определитель линеен по столбцу подъёма, поэтому при нулевом невозмущённом
    значении знак задаёт первый (по возрастанию глобального индекса) ненулевой
    кофактор этого столбца.
    """
    exact = _exact(points)
    base = _lifted_sign(exact)
    if base != 0:
        return base
    k = len(exact)
    lift_col = len(exact[0])  # 0-based индекс столбца подъёма
    for row in sorted(range(k), key=lambda r: indices[r]):
        others = [exact[r] + [Fraction(1)] for r in range(k) if r != row]
        cofactor = _det(others)
        if cofactor != 0:
            sign = 1 if (row + lift_col) % 2 == 0 else -1
            return _sign(cofactor) * sign
    return 0


def incircle_sos(a, b, c, d, indices) -> int:
    """incircle с разрешением кокругового вырождения по глобальным индексам."""
    det, err = incircle_float(a, b, c, d)
    if abs(float(det)) > float(err):
        return _sign(float(det))
    return lifted_sign_sos((a, b, c, d), indices)


def insphere_sos(a, b, c, d, e, indices) -> int:
    det, err = insphere_float(a, b, c, d, e)
    if abs(det) > err:
        return _sign(det)
    return lifted_sign_sos((a, b, c, d, e), indices)


# ======================== Пакетные фильтры ========================

def _det3_batch(m: np.ndarray) -> np.ndarray:
    return (m[:, 0, 0] * (m[:, 1, 1] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 1])
            - m[:, 0, 1] * (m[:, 1, 0] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 0])
            + m[:, 0, 2] * (m[:, 1, 0] * m[:, 2, 1] - m[:, 1, 1] * m[:, 2, 0]))


def _permanent3_batch(m: np.ndarray) -> np.ndarray:
    return (m[:, 0, 0] * (m[:, 1, 1] * m[:, 2, 2] + m[:, 1, 2] * m[:, 2, 1])
            + m[:, 0, 1] * (m[:, 1, 0] * m[:, 2, 2] + m[:, 1, 2] * m[:, 2, 0])
            + m[:, 0, 2] * (m[:, 1, 0] * m[:, 2, 1] + m[:, 1, 1] * m[:, 2, 0]))


def orient_batch(simplex_points: np.ndarray) -> np.ndarray:
    """
    Знаки ориентации для массива симплексов формы (m, d+1, d), d ∈ {2, 3}.
    Неопределённые фильтром случаи пересчитываются точно.
    """
    p = np.asarray(simplex_points, dtype=float)
    d = p.shape[2]
    if d == 2:
        a, b, c = p[:, 0], p[:, 1], p[:, 2]
        detleft = (a[:, 0] - c[:, 0]) * (b[:, 1] - c[:, 1])
        detright = (a[:, 1] - c[:, 1]) * (b[:, 0] - c[:, 0])
        det = detleft - detright
        err = ORIENT2D_BOUND * (np.abs(detleft) + np.abs(detright))
        exact = orient2d_exact
    else:
        m = p[:, :3] - p[:, 3:4]
        det = _det3_batch(m)
        err = ORIENT3D_BOUND * _permanent3_batch(np.abs(m))
        exact = orient3d_exact
    signs = np.sign(det).astype(int)
    for k in np.flatnonzero(np.abs(det) <= err):
        signs[k] = exact(*p[k])
    return signs


def insphere_float_batch(a, b, c, d, e) -> tuple[np.ndarray, np.ndarray]:
    rows = np.stack([a - e, b - e, c - e, d - e], axis=1)
    lifts = np.sum(rows * rows, axis=2)
    det = np.zeros(len(rows))
    permanent = np.zeros(len(rows))
    for i in range(4):
        minor = np.delete(rows, i, axis=1)
        sign = -1.0 if i % 2 == 0 else 1.0
        det += sign * lifts[:, i] * _det3_batch(minor)
        permanent += lifts[:, i] * _permanent3_batch(np.abs(minor))
    return det, INSPHERE_BOUND * permanent
