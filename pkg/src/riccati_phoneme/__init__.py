"""Vowel recognition with a Riccati-dynamics winner-take-all network.

Pipeline: 512-sample blocks -> windowed radix-2 FFT power spectra ->
15-channel unit-norm patterns -> competitive learning -> Voronoi
partition recognition. :mod:`riccati_phoneme.verify` checks the
convergence and stability behaviour of the weight dynamics numerically.
"""

from .errors import *  # noqa: F401,F403
from .features import (
    BandPlan,
    band_energies,
    default_band_plan,
    extract_pattern,
    gamma_floor,
    normalize_unit,
)
from .partition import (
    PhonemeAtom,
    RecognitionResult,
    VoronoiPartition,
    build_partition,
    central_vector,
    check_separation,
    recognize,
    recognize_via_network,
)
from .riccati_net import (
    Network,
    NetworkConfig,
    fixed_point,
    init_network,
    integrate,
    output,
    presentation_order,
    riccati_rhs,
    train,
    winner,
)
from .signal_io import (
    Block,
    Signal,
    VowelSpec,
    block_stream,
    default_corpus,
    read_wav,
    synth_vowel,
    write_wav,
)
from .spectrum import (
    PowerSpectrum,
    WindowKind,
    apply_window,
    average_spectra,
    fft_radix2,
    power_spectrum,
    real_fft_packed,
)

__version__ = "0.1.0"
