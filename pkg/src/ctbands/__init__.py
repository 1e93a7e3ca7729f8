"""Spectra of chiral-time symmetric non-Hermitian tight-binding models."""
from .dos import DosHistogram, dos_approx, dos_histogram, dos_linear_fit, symmetry_defect
from .errors import (
    BrokenBipartiteness,
    BrokenPhase,
    CTBandsError,
    DimensionMismatch,
    InsufficientBins,
    NoConvergence,
    NotHermitian,
    OddSize,
    OutsideRegime,
    ZeroEpsilon,
)
from .lattice import (
    BipartiteLattice,
    NhHamiltonian,
    apply_chiral,
    apply_ct,
    assemble,
    check_conjugate_pair_spectrum,
    check_ct_anticommutation,
    load_lattice,
    save_lattice,
)
from .models import (
    BandGrid,
    BilayerSpec,
    RiceMeleSpec,
    band_grid,
    bilayer_dispersion,
    bilayer_lattice,
    group_velocity,
    hyperboloid_params,
    rice_mele_dispersion,
    rice_mele_lattice,
    valley_analysis,
)
from .numerics import SvdResult, hermitian_eigen, svd
from .spectra import (
    SpectralPair,
    SpectrumReport,
    exceptional_scan,
    locate_transition,
    omega_norms,
    solve,
    theta_of,
)

__version__ = "0.1.0"
