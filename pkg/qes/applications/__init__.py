from qes.applications import decatic, dirac, phi6, reissner_nordstrom, two_electron
from qes.applications.base import AppSolution, WavefunctionDescriptor
from qes.applications.decatic import DecaticParams
from qes.applications.dirac import DiracParams
from qes.applications.phi6 import Phi6Params
from qes.applications.reissner_nordstrom import RNParams
from qes.applications.two_electron import TwoElectronParams

two_electron_solve = two_electron.solve
phi6_solve = phi6.solve
rn_solve = reissner_nordstrom.solve
dirac_solve = dirac.solve
decatic_solve = decatic.solve

APPLICATIONS = {
    two_electron.SYSTEM: (TwoElectronParams, two_electron_solve),
    phi6.SYSTEM: (Phi6Params, phi6_solve),
    reissner_nordstrom.SYSTEM: (RNParams, rn_solve),
    dirac.SYSTEM: (DiracParams, dirac_solve),
    decatic.SYSTEM: (DecaticParams, decatic_solve),
}

__all__ = [
    "APPLICATIONS",
    "AppSolution",
    "DecaticParams",
    "DiracParams",
    "Phi6Params",
    "RNParams",
    "TwoElectronParams",
    "WavefunctionDescriptor",
    "decatic_solve",
    "dirac_solve",
    "phi6_solve",
    "rn_solve",
    "two_electron_solve",
]
