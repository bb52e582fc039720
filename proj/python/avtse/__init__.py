"""Multichannel speech front-end: STFT features, mixture simulation,
guided source separation, MVDR beamforming, and CER/CTC scoring math."""

from avtse._avtse import (
    DEFAULT_MTL_LAMBDA,
    SAMPLE_RATE,
    align_and_count,
    apply_beamformer,
    apply_mask,
    attention_ce_log_prob,
    cacgmm_em,
    cer,
    circular_array_6,
    ctc_log_prob,
    estimate_scm,
    fbank,
    gss_enhance,
    ideal_ratio_mask,
    istft,
    lps,
    mel_filterbank,
    mix_at_snr,
    mse_mask_loss,
    mtl_loss,
    mvdr_weights,
    read_wav,
    si_snr,
    simulate_rir,
    stft,
    write_wav,
)

__all__ = [
    "DEFAULT_MTL_LAMBDA",
    "SAMPLE_RATE",
    "align_and_count",
    "apply_beamformer",
    "apply_mask",
    "attention_ce_log_prob",
    "cacgmm_em",
    "cer",
    "circular_array_6",
    "ctc_log_prob",
    "estimate_scm",
    "fbank",
    "gss_enhance",
    "ideal_ratio_mask",
    "istft",
    "lps",
    "mel_filterbank",
    "mix_at_snr",
    "mse_mask_loss",
    "mtl_loss",
    "mvdr_weights",
    "read_wav",
    "si_snr",
    "simulate_rir",
    "stft",
    "write_wav",
    "cli_path",
]


def cli_path():
    """Path to the bundled command-line tool, if installed with the wheel."""
    import os

    path = os.path.join(os.path.dirname(__file__), "bin", "avtse")
    return path if os.path.exists(path) else None
