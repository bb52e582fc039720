#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "avtse/activity.hpp"
#include "avtse/beamform.hpp"
#include "avtse/cacgmm.hpp"
#include "avtse/evalkit.hpp"
#include "avtse/features.hpp"
#include "avtse/gss.hpp"
#include "avtse/masks.hpp"
#include "avtse/mixsim.hpp"
#include "avtse/rir.hpp"
#include "avtse/sisnr.hpp"
#include "avtse/stft.hpp"
#include "avtse/wavio.hpp"

namespace py = pybind11;
using namespace avtse;

namespace {

WindowType window_from_name(const std::string& name) {
  if (name == "hann") return WindowType::Hann;
  if (name == "sqrt_hann") return WindowType::SqrtHann;
  if (name == "rect") return WindowType::Rect;
  throw std::invalid_argument("unknown window '" + name + "'");
}

StftConfig make_config(std::size_t fft_size, std::size_t hop, const std::string& window) {
  StftConfig cfg{fft_size, hop, window_from_name(window)};
  cfg.validate();
  return cfg;
}

// 1-D array -> single channel, 2-D array -> [channel][sample]
Waveform waveform_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
  Waveform w;
  if (x.ndim() == 1) {
    w.samples.assign(1, std::vector<double>(x.data(), x.data() + x.shape(0)));
  } else if (x.ndim() == 2) {
    for (py::ssize_t c = 0; c < x.shape(0); ++c)
      w.samples.emplace_back(x.data() + c * x.shape(1), x.data() + (c + 1) * x.shape(1));
  } else {
    throw std::invalid_argument("expected a 1-D or 2-D sample array");
  }
  return w;
}

py::array_t<double> array_from_waveform(const Waveform& w, bool squeeze) {
  if (squeeze && w.channels() == 1) {
    py::array_t<double> out(static_cast<py::ssize_t>(w.length()));
    std::copy(w.channel(0).begin(), w.channel(0).end(), out.mutable_data());
    return out;
  }
  py::array_t<double> out({static_cast<py::ssize_t>(w.channels()),
                           static_cast<py::ssize_t>(w.length())});
  for (std::size_t c = 0; c < w.channels(); ++c)
    std::copy(w.channel(c).begin(), w.channel(c).end(),
              out.mutable_data() + static_cast<py::ssize_t>(c * w.length()));
  return out;
}

using ComplexArray =
    py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

// 2-D array -> one channel [frame][freq], 3-D array -> [channel][frame][freq]
ComplexSpectrogram spec_from_array(const ComplexArray& x, const StftConfig& cfg) {
  ComplexSpectrogram spec;
  spec.config = cfg;
  const auto fill_channel = [&](const std::complex<double>* data, py::ssize_t frames,
                                py::ssize_t freqs) {
    std::vector<std::vector<std::complex<double>>> ch(static_cast<std::size_t>(frames));
    for (py::ssize_t t = 0; t < frames; ++t)
      ch[static_cast<std::size_t>(t)].assign(data + t * freqs, data + (t + 1) * freqs);
    spec.bins.push_back(std::move(ch));
  };
  if (x.ndim() == 2) {
    fill_channel(x.data(), x.shape(0), x.shape(1));
  } else if (x.ndim() == 3) {
    for (py::ssize_t c = 0; c < x.shape(0); ++c)
      fill_channel(x.data() + c * x.shape(1) * x.shape(2), x.shape(1), x.shape(2));
  } else {
    throw std::invalid_argument("expected a 2-D or 3-D spectrogram array");
  }
  return spec;
}

py::array_t<std::complex<double>> array_from_spec(const ComplexSpectrogram& spec, bool squeeze) {
  const auto c = static_cast<py::ssize_t>(spec.channels());
  const auto t = static_cast<py::ssize_t>(spec.frames());
  const auto f = static_cast<py::ssize_t>(spec.freq_bins());
  py::array_t<std::complex<double>> out;
  if (squeeze && c == 1)
    out = py::array_t<std::complex<double>>({t, f});
  else
    out = py::array_t<std::complex<double>>({c, t, f});
  auto* data = out.mutable_data();
  for (py::ssize_t ci = 0; ci < c; ++ci)
    for (py::ssize_t ti = 0; ti < t; ++ti)
      std::copy(spec.bins[static_cast<std::size_t>(ci)][static_cast<std::size_t>(ti)].begin(),
                spec.bins[static_cast<std::size_t>(ci)][static_cast<std::size_t>(ti)].end(),
                data + (ci * t + ti) * f);
  return out;
}

std::vector<DiarizationSegment> segments_from_tuples(
    const std::vector<std::tuple<std::string, double, double>>& segments) {
  std::vector<DiarizationSegment> out;
  for (const auto& [spk, start, end] : segments) out.push_back({spk, start, end});
  return out;
}

}  // namespace

PYBIND11_MODULE(_avtse, m) {
  m.doc() = "multichannel speech enhancement and scoring core";
  m.attr("SAMPLE_RATE") = kSampleRate;
  m.attr("DEFAULT_MTL_LAMBDA") = kDefaultMtlLambda;

  m.def(
      "stft",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
         std::size_t fft_size, std::size_t hop, const std::string& window) {
        const auto cfg = make_config(fft_size, hop, window);
        const Waveform w = waveform_from_array(x);
        return array_from_spec(w.channels() == 1 ? stft(w, cfg) : stft_multi(w, cfg),
                               x.ndim() == 1);
      },
      py::arg("samples"), py::arg("fft_size") = 512, py::arg("hop") = 256,
      py::arg("window") = "hann",
      "Short-time Fourier transform; 1-D input gives [frame][freq], 2-D input "
      "[channel][frame][freq].");

  m.def(
      "istft",
      [](const ComplexArray& spec, std::size_t length, std::size_t fft_size, std::size_t hop,
         const std::string& window) {
        const auto cfg = make_config(fft_size, hop, window);
        return array_from_waveform(istft(spec_from_array(spec, cfg), cfg, length), true);
      },
      py::arg("spectrogram"), py::arg("length"), py::arg("fft_size") = 512, py::arg("hop") = 256,
      py::arg("window") = "hann", "Overlap-add synthesis, the inverse of stft().");

  m.def(
      "lps",
      [](const ComplexArray& spec) { return lps(spec_from_array(spec, StftConfig{})); },
      py::arg("spectrogram"), "Log power spectrum ln(|X|^2 + 1e-10) of a [frame][freq] array.");

  m.def(
      "mel_filterbank",
      [](int n_mels, double f_low, double f_high, std::size_t fft_size) {
        return mel_filterbank({n_mels, f_low, f_high}, fft_size, kSampleRate);
      },
      py::arg("n_mels") = 80, py::arg("f_low") = 0.0, py::arg("f_high") = 8000.0,
      py::arg("fft_size") = 512, "Triangular mel filters, [filter][fft_bin].");

  m.def(
      "fbank",
      [](const ComplexArray& spec, int n_mels, double f_low, double f_high) {
        return fbank(spec_from_array(spec, StftConfig{}), {n_mels, f_low, f_high});
      },
      py::arg("spectrogram"), py::arg("n_mels") = 80, py::arg("f_low") = 0.0,
      py::arg("f_high") = 8000.0, "Log mel filterbank energies, [frame][mel].");

  m.def(
      "si_snr",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& estimate,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& reference) {
        return si_snr(waveform_from_array(estimate), waveform_from_array(reference));
      },
      py::arg("estimate"), py::arg("reference"),
      "Scale-invariant SNR in dB, capped at +60.");

  m.def(
      "ideal_ratio_mask",
      [](const ComplexArray& clean, const ComplexArray& noise) {
        return ideal_ratio_mask(spec_from_array(clean, StftConfig{}),
                                spec_from_array(noise, StftConfig{}));
      },
      py::arg("clean"), py::arg("noise"),
      "Oracle magnitude mask from aligned additive components.");

  m.def(
      "apply_mask",
      [](const ComplexArray& spec, const Mask& mask) {
        return array_from_spec(apply_mask(spec_from_array(spec, StftConfig{}), mask),
                               spec.ndim() == 2);
      },
      py::arg("spectrogram"), py::arg("mask"), "Scale magnitudes by the mask, phase preserved.");

  m.def("mse_mask_loss", &mse_mask_loss, py::arg("estimate"), py::arg("target"));

  m.def(
      "mix_at_snr",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& target,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& noise,
         double snr_db) {
        const auto result =
            mix_at_snr(waveform_from_array(target), waveform_from_array(noise), snr_db);
        const bool squeeze = target.ndim() == 1;
        return py::make_tuple(array_from_waveform(result.mixture, squeeze),
                              array_from_waveform(result.scaled_noise, squeeze),
                              result.noise_scale);
      },
      py::arg("target"), py::arg("noise"), py::arg("snr_db"),
      "Scale noise to the requested SNR over target-active samples; returns "
      "(mixture, scaled_noise, noise_scale).");

  m.def(
      "simulate_rir",
      [](const Vec3& room_dims, double absorption, int max_order, const Vec3& source,
         const std::vector<Vec3>& mics) {
        RoomSpec room;
        room.dimensions = room_dims;
        room.set_uniform_absorption(absorption);
        room.max_reflection_order = max_order;
        ArrayGeometry geom;
        geom.mic_positions = mics;
        return simulate_rir(room, source, geom);
      },
      py::arg("room_dims"), py::arg("absorption"), py::arg("max_order"), py::arg("source"),
      py::arg("mics"), "Image-source impulse responses, one list of taps per microphone.");

  m.def(
      "circular_array_6",
      [](const Vec3& center, double radius) {
        return circular_array_6(center, radius).mic_positions;
      },
      py::arg("center"), py::arg("radius") = 0.1,
      "Positions of a 6-microphone circular array in the horizontal plane.");

  m.def(
      "cacgmm_em",
      [](const ComplexArray& observations, const std::vector<std::vector<bool>>& activities,
         int iterations) {
        if (observations.ndim() != 3)
          throw std::invalid_argument("observations must be [channel][frame][freq]");
        ActivityPattern pattern;
        pattern.active = activities;
        const auto result =
            cacgmm_em(spec_from_array(observations, StftConfig{}), pattern, iterations);
        py::list masks;
        for (const auto& mask : result.masks) masks.append(py::cast(mask));
        return py::make_tuple(masks, result.state.log_likelihood_trace);
      },
      py::arg("observations"), py::arg("activities"), py::arg("iterations") = 20,
      "Activity-constrained mixture-model masks; returns (masks, log_likelihood_trace).");

  m.def(
      "gss_enhance",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& mixture,
         const std::vector<std::tuple<std::string, double, double>>& segments,
         const std::string& target_speaker, std::size_t fft_size, std::size_t hop,
         const std::string& window, std::size_t context_pad, int iterations,
         std::size_t ref_channel, bool apply_post_mask, double mask_floor) {
        GssConfig cfg;
        cfg.stft = make_config(fft_size, hop, window);
        cfg.context_pad = context_pad;
        cfg.iterations = iterations;
        cfg.ref_channel = ref_channel;
        cfg.apply_post_mask = apply_post_mask;
        cfg.mask_floor = mask_floor;
        return array_from_waveform(
            gss_enhance(waveform_from_array(mixture), segments_from_tuples(segments),
                        target_speaker, cfg),
            true);
      },
      py::arg("mixture"), py::arg("segments"), py::arg("target_speaker"),
      py::arg("fft_size") = 512, py::arg("hop") = 256, py::arg("window") = "hann",
      py::arg("context_pad") = 15, py::arg("iterations") = 20, py::arg("ref_channel") = 0,
      py::arg("apply_post_mask") = true, py::arg("mask_floor") = 0.2,
      "Diarization-guided target extraction from a [channel][sample] mixture; "
      "segments are (speaker, start_seconds, end_seconds) tuples.");

  m.def(
      "estimate_scm",
      [](const ComplexArray& spec, const Mask& mask) {
        const auto scm = estimate_scm(spec_from_array(spec, StftConfig{}), mask);
        py::list matrices;
        for (const auto& phi : scm.matrices) matrices.append(py::cast(phi));
        return matrices;
      },
      py::arg("spectrogram"), py::arg("mask"),
      "Mask-weighted spatial covariance matrices, one per frequency.");

  m.def(
      "mvdr_weights",
      [](const std::vector<Eigen::MatrixXcd>& target, const std::vector<Eigen::MatrixXcd>& noise,
         std::size_t ref_channel) {
        SpatialCovariance ts, ns;
        ts.matrices = target;
        ts.mask_weight_sum.assign(target.size(), 1.0);
        ns.matrices = noise;
        ns.mask_weight_sum.assign(noise.size(), 1.0);
        return mvdr_weights(ts, ns, ref_channel);
      },
      py::arg("target_scm"), py::arg("noise_scm"), py::arg("ref_channel") = 0,
      "Distortionless beamformer weights, one vector per frequency.");

  m.def(
      "apply_beamformer",
      [](const ComplexArray& spec, const std::vector<Eigen::VectorXcd>& weights) {
        return array_from_spec(
            apply_beamformer(spec_from_array(spec, StftConfig{}), weights), true);
      },
      py::arg("spectrogram"), py::arg("weights"), "w^H y per time-frequency bin.");

  m.def(
      "align_and_count",
      [](const std::string& reference, const std::string& hypothesis) {
        const auto c = align_and_count(reference, hypothesis);
        py::dict out;
        out["substitutions"] = c.substitutions;
        out["deletions"] = c.deletions;
        out["insertions"] = c.insertions;
        out["ref_length"] = c.ref_length;
        return out;
      },
      py::arg("reference"), py::arg("hypothesis"),
      "Minimal edit alignment counts over Unicode code points.");

  m.def(
      "cer",
      [](std::int64_t substitutions, std::int64_t deletions, std::int64_t insertions,
         std::int64_t ref_length) {
        return cer({substitutions, deletions, insertions, ref_length});
      },
      py::arg("substitutions"), py::arg("deletions"), py::arg("insertions"),
      py::arg("ref_length"), "(S + D + I) / N * 100.");

  m.def(
      "ctc_log_prob",
      [](const Eigen::MatrixXd& log_probs, const std::vector<int>& target, int blank) {
        PosteriorMatrix post;
        post.log_probs = log_probs;
        post.blank = blank;
        return ctc_log_prob(post, target);
      },
      py::arg("log_probs"), py::arg("target"), py::arg("blank") = 0,
      "CTC forward log-probability of the target label sequence.");

  m.def(
      "attention_ce_log_prob",
      [](const Eigen::MatrixXd& log_probs, const std::vector<int>& target) {
        PosteriorMatrix post;
        post.log_probs = log_probs;
        return attention_ce_log_prob(post, target);
      },
      py::arg("log_probs"), py::arg("target"),
      "Stepwise cross-entropy log-probability of the target.");

  m.def("mtl_loss", &mtl_loss, py::arg("logp_ctc"), py::arg("logp_att"),
        py::arg("lam") = kDefaultMtlLambda,
        "lam * logp_ctc + (1 - lam) * logp_att.");

  m.def(
      "read_wav",
      [](const std::string& path) {
        const Waveform w = read_wav(path);
        return py::make_tuple(array_from_waveform(w, false), w.sample_rate);
      },
      py::arg("path"), "Returns ([channel][sample] float array, sample_rate).");

  m.def(
      "write_wav",
      [](const std::string& path,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& samples,
         int sample_rate, const std::string& format) {
        Waveform w = waveform_from_array(samples);
        w.sample_rate = sample_rate;
        WavFormat fmt;
        if (format == "float32")
          fmt = WavFormat::Float32;
        else if (format == "pcm16")
          fmt = WavFormat::Pcm16;
        else
          throw std::invalid_argument("unknown wav format '" + format + "'");
        write_wav(path, w, fmt);
      },
      py::arg("path"), py::arg("samples"), py::arg("sample_rate") = kSampleRate,
      py::arg("format") = "float32");
}
