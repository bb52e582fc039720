#pragma once

#include "avtse/waveform.hpp"

namespace avtse {

inline constexpr double kSiSnrCapDb = 60.0;

// Scale-invariant SNR in dB. Both signals are zero-meaned, the estimate is
// projected onto the reference, and the projection/residual power ratio is
// returned, capped at kSiSnrCapDb so identical signals compare finitely.
double si_snr(const Waveform& estimate, const Waveform& reference);

}  // namespace avtse
