#!/usr/bin/env python3
"""Regenerate the molecular fixture files under data/molecules/.

The fixtures are synthetic two- and four-orbital electronic Hamiltonians
with hydrogen- and helium-dimer-like structure (bonding/antibonding
orbital energies, Coulomb/exchange blocks, pair-hopping), labeled by a
nominal bond length. Benchmarks treat the ingested Hamiltonian itself as
ground truth, so the files only need to be Hermitian, smooth in the
label, and well-conditioned for the superposition pipeline.
"""

from __future__ import annotations

import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from sgslab.hamiltonians import (  # noqa: E402
    FermionHamiltonian,
    jordan_wigner,
    write_fermion_hamiltonian,
    write_qubit_hamiltonian,
)

OUT = REPO / "data" / "molecules"


def two_orbital_model(eps_g, eps_u, j_gg, j_uu, j_gu, k_gu) -> FermionHamiltonian:
    """Minimal bonding/antibonding model; spin orbitals (g up, g dn, u up, u dn)."""
    one = {(0, 0): eps_g, (1, 1): eps_g, (2, 2): eps_u, (3, 3): eps_u}
    two: dict[tuple[int, int, int, int], float] = {}

    def density_density(i, j, v):
        two[(i, j, j, i)] = two.get((i, j, j, i), 0.0) + v
        two[(j, i, i, j)] = two.get((j, i, i, j), 0.0) + v

    density_density(0, 1, j_gg)
    density_density(2, 3, j_uu)
    density_density(0, 2, j_gu - k_gu)
    density_density(1, 3, j_gu - k_gu)
    density_density(0, 3, j_gu)
    density_density(1, 2, j_gu)
    # pair hop g^2 <-> u^2 and the spin-flip exchange that completes the
    # triplet multiplet
    two[(2, 3, 1, 0)] = 2 * k_gu
    two[(0, 1, 3, 2)] = 2 * k_gu
    two[(0, 3, 1, 2)] = 2 * k_gu
    two[(2, 1, 3, 0)] = 2 * k_gu
    return FermionHamiltonian(4, one, two)


H2_PARAMS = {
    # label: eps_g, eps_u, J_gg, J_uu, J_gu, K_gu
    "0.50": (-1.385, -0.295, 0.715, 0.742, 0.700, 0.146),
    "0.735": (-1.252, -0.476, 0.674, 0.697, 0.663, 0.181),
    "1.00": (-1.110, -0.585, 0.625, 0.653, 0.610, 0.226),
}


def four_orbital_model(eps, j, k, hops) -> FermionHamiltonian:
    """Four spatial orbitals, eight spin orbitals (up/down interleaved)."""
    n_mo = len(eps)
    one = {}
    for m, e in enumerate(eps):
        one[(2 * m, 2 * m)] = e
        one[(2 * m + 1, 2 * m + 1)] = e
    two: dict[tuple[int, int, int, int], float] = {}

    def density_density(i, jj, v):
        two[(i, jj, jj, i)] = two.get((i, jj, jj, i), 0.0) + v
        two[(jj, i, i, jj)] = two.get((jj, i, i, jj), 0.0) + v

    for m in range(n_mo):
        density_density(2 * m, 2 * m + 1, j[m][m])
        for mm in range(m + 1, n_mo):
            density_density(2 * m, 2 * mm, j[m][mm] - k[m][mm])
            density_density(2 * m + 1, 2 * mm + 1, j[m][mm] - k[m][mm])
            density_density(2 * m, 2 * mm + 1, j[m][mm])
            density_density(2 * m + 1, 2 * mm, j[m][mm])
    for (m, mm), v in hops.items():
        two[(2 * mm, 2 * mm + 1, 2 * m + 1, 2 * m)] = 2 * v
        two[(2 * m, 2 * m + 1, 2 * mm + 1, 2 * mm)] = 2 * v
    return FermionHamiltonian(2 * n_mo, one, two)


HE2_PARAMS = {
    "1.00": dict(
        eps=[-3.10, -2.90, -0.40, -0.20],
        j=[
            [1.02, 0.92, 0.78, 0.74],
            [0.92, 0.96, 0.76, 0.72],
            [0.78, 0.76, 0.70, 0.66],
            [0.74, 0.72, 0.66, 0.64],
        ],
        k=[
            [0.00, 0.11, 0.06, 0.05],
            [0.11, 0.00, 0.05, 0.06],
            [0.06, 0.05, 0.00, 0.09],
            [0.05, 0.06, 0.09, 0.00],
        ],
        hops={(0, 2): 0.07, (1, 3): 0.06, (0, 3): 0.05, (1, 2): 0.05},
    ),
}


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for label, params in H2_PARAMS.items():
        fermion = two_orbital_model(*params)
        tag = label.replace(".", "")
        write_fermion_hamiltonian(fermion, OUT / f"h2_r{tag}.fermion.txt")
        write_qubit_hamiltonian(jordan_wigner(fermion), OUT / f"h2_r{tag}.qubits.txt")
        print(f"wrote h2_r{tag} ({label} angstrom)")
    for label, params in HE2_PARAMS.items():
        fermion = four_orbital_model(**params)
        tag = label.replace(".", "")
        write_fermion_hamiltonian(fermion, OUT / f"he2_r{tag}.fermion.txt")
        write_qubit_hamiltonian(jordan_wigner(fermion), OUT / f"he2_r{tag}.qubits.txt")
        print(f"wrote he2_r{tag} ({label} angstrom)")


if __name__ == "__main__":
    main()
