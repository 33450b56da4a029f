#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

namespace invdes::oracles {

struct FilmLayer {
  std::string material;
  double thickness_nm = 0.0;
};

struct ThinFilmConfig {
  std::complex<double> ambient_index{1.0, 0.0};
  std::complex<double> substrate_index{1.52, 0.0};
  std::vector<double> wavelengths_nm;
  double incidence_deg = 0.0;
};

struct ThinFilmDesign {
  std::vector<FilmLayer> layers;
};

inline constexpr std::size_t kMaxFilmLayers = 12;
inline constexpr double kMinThicknessNm = 1.0;
inline constexpr double kMaxThicknessNm = 2000.0;

/// Refractive index table; complex part is the extinction coefficient.
using MaterialTable = std::map<std::string, std::complex<double>>;

/// Bundled non-dispersive material table.
const MaterialTable& material_table();

struct Spectrum {
  std::vector<double> wavelengths_nm;
  std::vector<double> reflectance;    // unpolarized
  std::vector<double> transmittance;  // unpolarized
};

/// Transfer-matrix (characteristic matrix) solution for a planar stack,
/// averaged over s and p polarization.
Spectrum simulate_thinfilm(const ThinFilmDesign& design, const ThinFilmConfig& config,
                           const MaterialTable& materials = material_table());

}  // namespace invdes::oracles
