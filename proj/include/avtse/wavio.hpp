#pragma once

#include <string>

#include "avtse/waveform.hpp"

namespace avtse {

enum class WavFormat { Pcm16, Float32 };

// Little-endian RIFF reader. Accepts PCM 16-bit and IEEE float 32-bit.
Waveform read_wav(const std::string& path);

void write_wav(const std::string& path, const Waveform& wave,
               WavFormat format = WavFormat::Float32);

}  // namespace avtse
