#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "concord/classic.hpp"
#include "concord/pa.hpp"
#include "concord/rng.hpp"

namespace concord {

/// Gray-intensity raster with its value-range metadata.
struct Image {
  Eigen::MatrixXd pixels;  // ny x nx
  double range_min = 0.0;
  double range_max = 1.0;

  Eigen::Index width() const { return pixels.cols(); }
  Eigen::Index height() const { return pixels.rows(); }
  std::vector<double> vectorized() const;  // row-major
};

Image make_image(Eigen::MatrixXd pixels);

/// PGM (P2/P5, maxval-normalized to [0,1]), CSV grid, or whitespace matrix,
/// chosen by content.
Image load_image(const std::string& path);

struct SsimConstants {
  double c1 = 1e-4;
  double c2 = 9e-4;
  double c3 = 4.5e-4;
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;

  /// Standard stabilizers from a dynamic range L:
  /// c1 = (0.01 L)^2, c2 = (0.03 L)^2, c3 = c2/2.
  static SsimConstants from_range(double range);
};

struct SsimResult {
  double value = 0.0;
  double luminance = 0.0;
  double contrast = 0.0;
  double structure = 0.0;
};

/// Whole-image SSIM from global means, variances and covariance of the
/// vectorized pixels: l^alpha * c^beta * s^gamma.
SsimResult ssim(const Image& a, const Image& b, const SsimConstants& k);

/// Same, with constants derived from the pair's joint dynamic range.
SsimResult ssim(const Image& a, const Image& b);

enum class ContaminationMode { additive, replace };

struct Contamination {
  Image image;
  std::vector<std::uint8_t> mask;  // row-major, 1 = corrupted
  std::size_t corrupted = 0;
};

/// Salt-and-pepper style contamination: each pixel is independently
/// selected with probability delta; selected pixels receive zero-mean
/// normal noise of model variance tau2, realized scale-equivariantly as
/// tau2/sigma2 times the image's own variance (so a standardized image
/// with sigma2 = 1 gets exactly tau2). `replace` draws the corrupted pixel
/// fresh around the image mean instead of adding to it (the strict mixture
/// reading). Requires tau2 > sigma2.
Contamination contaminate(const Image& img, double delta, double sigma2,
                          double tau2, ContaminationMode mode, Rng& rng);

struct ImageAgreementReport {
  double pearson = 0.0;
  double ccc = 0.0;
  SsimResult ssim;
  PaCurve pa;
  LimitsOfAgreement loa;
};

/// All agreement metrics on the vectorized pixel pairs, as given (no
/// rescaling): Pearson, Lin CCC, SSIM, PA curve from the ML fit, and
/// Bland-Altman limits with plot series.
ImageAgreementReport agreement_report(const Image& a, const Image& b,
                                      const std::vector<double>& c_grid);

/// One row of the contamination study: seed-averaged metrics at level delta.
struct ContaminationStudyRow {
  double delta = 0.0;
  double pearson = 0.0;
  double ccc = 0.0;
  double ssim = 0.0;
  PaCurve pa;  // averaged over seeds
};

/// Reproduction of the motivating contamination table. Per level and seed:
/// contaminate at (sigma2 = 1, tau2 = 10); Pearson and SSIM compare the
/// image with its contaminated version on the working scale; the CCC row
/// compares the original on its native 8-bit scale (pixels * 255) against
/// the working-scale contaminated image, which is what makes its magnitude
/// collapse while Pearson stays high. PA curves come from the ML fit of
/// the working-scale pair.
std::vector<ContaminationStudyRow> contamination_study(
    const Image& original, const std::vector<double>& deltas, int seeds,
    ContaminationMode mode, const std::vector<double>& c_grid, Rng& rng);

}  // namespace concord
