"""Independent reference implementations used by the tests.

Nothing here imports the package's builders: the lattice Hamiltonian is
assembled from Kronecker products of 2x2 Pauli matrices term by term, so a
convention slip in the Pauli-string code cannot hide behind itself.
"""

from functools import reduce

import numpy as np

I2 = np.eye(2, dtype=complex)
PX = np.array([[0, 1], [1, 0]], dtype=complex)
PY = np.array([[0, -1j], [1j, 0]], dtype=complex)
PZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"X": PX, "Y": PY, "Z": PZ}


def site_op(n_sites, ops):
    """Tensor product with ``ops = {site: 2x2}``; site 1 is the leftmost factor."""
    return reduce(np.kron, [ops.get(s, I2) for s in range(1, n_sites + 1)])


def alphas(n_sites, a=1.0, L=1.0, r_h=0.0):
    r = r_h + a * np.arange(1, n_sites + 1)
    return np.sqrt(r**2 - r_h**2) / L


def dense_hamiltonian(n_sites, m, mu, a=1.0, L=1.0, r_h=0.0, fields=None, weighted=False):
    """Lattice Hamiltonian with every identity constant kept."""
    al = alphas(n_sites, a, L, r_h)
    H = np.zeros((2**n_sites, 2**n_sites), dtype=complex)
    const = 0.0
    for n in range(1, n_sites):
        hop = al[n - 1] ** 2 / (4 * a)
        H += hop * (site_op(n_sites, {n: PX, n + 1: PX}) + site_op(n_sites, {n: PY, n + 1: PY}))
        c = a * n / (8 * L**2)
        H += c * (site_op(n_sites, {n: PX, n + 1: PY}) - site_op(n_sites, {n: PY, n + 1: PX}))
    for n in range(1, n_sites + 1):
        s = (-1) ** n
        z = site_op(n_sites, {n: PZ})
        H += 0.5 * m * s * al[n - 1] * z
        const += 0.5 * m * s * al[n - 1]
        H += -0.5 * mu * al[n - 1] * z
        const += -0.5 * mu * al[n - 1] * s
        if fields is not None:
            w = al[n - 1] if weighted else 1.0
            H += 0.5 * w * fields[n - 1] * z
    return H + const * np.eye(2**n_sites), const


def von_neumann(psi, n_sites, cut):
    """Entropy of sites ``1..cut`` by SVD of the reshaped amplitude vector."""
    s = np.linalg.svd(psi.reshape(2**cut, 2 ** (n_sites - cut)), compute_uv=False)
    p = s**2
    p = p[p > 1e-300]
    return float(-np.sum(p * np.log(p)))


def wigner_surmise_samples(n, rng):
    """Unit-mean spacings with density ``(pi/2) s exp(-pi s^2 / 4)`` by inversion."""
    u = rng.random(n)
    return np.sqrt(-4.0 / np.pi * np.log1p(-u))
