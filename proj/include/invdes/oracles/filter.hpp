#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace invdes::oracles {

enum class FilterFamily { Butterworth, Chebyshev1, Chebyshev2 };
enum class FilterResponse { Lowpass, Highpass, Bandpass, Bandstop };

struct FilterDesign {
  FilterFamily family = FilterFamily::Butterworth;
  int order = 2;
  FilterResponse response = FilterResponse::Lowpass;
  std::vector<double> cutoffs;  // fraction of Nyquist, one or two
  std::optional<double> ripple_db;       // Chebyshev I passband ripple
  std::optional<double> attenuation_db;  // Chebyshev II stopband attenuation
};

inline constexpr double kDefaultRippleDb = 1.0;
inline constexpr double kDefaultAttenuationDb = 40.0;
inline constexpr int kMaxFilterOrder = 10;

/// Parses a family token. "elliptic" and anything else unknown raise
/// UnsupportedFeature / ValidationError respectively.
FilterFamily filter_family_from_string(const std::string& s);
FilterResponse filter_response_from_string(const std::string& s);
std::string to_string(FilterFamily f);
std::string to_string(FilterResponse r);

class UnsupportedFeature : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Zpk {
  std::vector<std::complex<double>> zeros;
  std::vector<std::complex<double>> poles;
  double gain = 1.0;
};

/// Digital zeros/poles/gain: analog prototype, band transformation with
/// prewarped edges, bilinear transform.
Zpk design_iir(const FilterDesign& design);

/// H(e^{i*pi*f}) for f in [0, 1] (fraction of Nyquist).
std::complex<double> frequency_response(const Zpk& zpk, double f);

struct FilterMetrics {
  double cutoff_minus3db = 0.0;
  double stopband_attenuation_db = 0.0;
  double passband_ripple_db = 0.0;
  double transition_bandwidth = 0.0;
  double group_delay_variation = 0.0;  // samples
};

inline constexpr int kDefaultFilterGrid = 2048;

/// Designs the filter and measures its response on grid_points + 1 uniformly
/// spaced frequencies covering [0, Nyquist].
FilterMetrics design_filter(const FilterDesign& design, int grid_points = kDefaultFilterGrid);

}  // namespace invdes::oracles
