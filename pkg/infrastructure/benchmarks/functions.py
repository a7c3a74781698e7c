"""
Замкнутые формы тестовых функций и их аналитические градиенты.

Все функции принимают массив точек формы (n, d) и векторизованы по n.
"""
import numpy as np

RASTRIGIN_A = 10.0


def rastrigin(x):
    return RASTRIGIN_A * x.shape[1] + np.sum(x**2 - RASTRIGIN_A * np.cos(2 * np.pi * x), axis=1)


def rastrigin_grad(x):
    return 2 * x + 2 * np.pi * RASTRIGIN_A * np.sin(2 * np.pi * x)


def ackley(x):
    n = x.shape[1]
    out = (
        -20 * np.exp(-0.2 * np.sqrt(np.sum(x**2, axis=1) / n))
        - np.exp(np.sum(np.cos(2 * np.pi * x), axis=1) / n)
        + np.e
        + 20
    )
    return out


def ackley_grad(x):
    n = x.shape[1]
    r = np.sqrt(np.sum(x**2, axis=1) / n)[:, None]
    # устранимая особенность 0/0 в начале координат: градиент полагаем нулевым
    with np.errstate(invalid="ignore", divide="ignore"):
        radial = np.where(r > 0, 4 * np.exp(-0.2 * r) * x / (n * r), 0.0)
    cos_mean = np.sum(np.cos(2 * np.pi * x), axis=1)[:, None] / n
    return radial + (2 * np.pi / n) * np.sin(2 * np.pi * x) * np.exp(cos_mean)


def sphere(x):
    return np.sum(x**2, axis=1)


def sphere_grad(x):
    return 2 * x


def rosenbrock(x):
    return np.sum(100 * (x[:, 1:] - x[:, :-1] ** 2) ** 2 + (1 - x[:, :-1]) ** 2, axis=1)


def rosenbrock_grad(x):
    g = np.zeros_like(x)
    inner = x[:, 1:] - x[:, :-1] ** 2
    g[:, :-1] += -400 * x[:, :-1] * inner - 2 * (1 - x[:, :-1])
    g[:, 1:] += 200 * inner
    return g


def _beale_residuals(x):
    x_1, x_2 = x[:, 0], x[:, 1]
    return (
        1.5 - x_1 + x_1 * x_2,
        2.25 - x_1 + x_1 * x_2**2,
        2.625 - x_1 + x_1 * x_2**3,
    )


def beale(x):
    r1, r2, r3 = _beale_residuals(x)
    return r1**2 + r2**2 + r3**2


def beale_grad(x):
    x_1, x_2 = x[:, 0], x[:, 1]
    r1, r2, r3 = _beale_residuals(x)
    d1 = 2 * r1 * (x_2 - 1) + 2 * r2 * (x_2**2 - 1) + 2 * r3 * (x_2**3 - 1)
    d2 = 2 * r1 * x_1 + 4 * r2 * x_1 * x_2 + 6 * r3 * x_1 * x_2**2
    return np.stack([d1, d2], axis=1)


def booth(x):
    x_1, x_2 = x[:, 0], x[:, 1]
    return (x_1 + 2 * x_2 - 7) ** 2 + (2 * x_1 + x_2 - 5) ** 2


def booth_grad(x):
    x_1, x_2 = x[:, 0], x[:, 1]
    a = x_1 + 2 * x_2 - 7
    b = 2 * x_1 + x_2 - 5
    return np.stack([2 * a + 4 * b, 4 * a + 2 * b], axis=1)


# Постоянный гессиан Booth: [[10, 8], [8, 10]], собственные числа 18 и 2
BOOTH_HESSIAN = np.array([[10.0, 8.0], [8.0, 10.0]])
