#include "concord/image.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "concord/errors.hpp"

namespace concord {

std::vector<double> Image::vectorized() const {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(pixels.size()));
  for (Eigen::Index i = 0; i < pixels.rows(); ++i)
    for (Eigen::Index j = 0; j < pixels.cols(); ++j) v.push_back(pixels(i, j));
  return v;
}

Image make_image(Eigen::MatrixXd pixels) {
  if (pixels.rows() < 1 || pixels.cols() < 1)
    throw invalid_data_error("Image: empty raster");
  if (!pixels.allFinite())
    throw invalid_data_error("Image: non-finite pixel values");
  Image img;
  img.range_min = pixels.minCoeff();
  img.range_max = pixels.maxCoeff();
  img.pixels = std::move(pixels);
  return img;
}

namespace {

Image load_pgm(std::ifstream& in, const std::string& path) {
  auto next_token = [&in, &path]() -> std::string {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw parse_error("PGM truncated: " + path, 0);
  };

  const std::string magic = next_token();
  const bool binary = magic == "P5";
  if (!binary && magic != "P2")
    throw parse_error("unsupported PGM magic '" + magic + "' in " + path, 1);

  const int nx = std::stoi(next_token());
  const int ny = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (nx < 1 || ny < 1 || maxval < 1)
    throw parse_error("bad PGM header in " + path, 1);

  Eigen::MatrixXd pixels(ny, nx);
  if (binary) {
    in.get();  // single whitespace after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(static_cast<std::size_t>(nx) * ny * bytes);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      throw parse_error("PGM pixel data truncated: " + path, 0);
    std::size_t k = 0;
    for (int i = 0; i < ny; ++i)
      for (int j = 0; j < nx; ++j) {
        unsigned value = buf[k++];
        if (bytes == 2) value = (value << 8) | buf[k++];
        pixels(i, j) = static_cast<double>(value) / maxval;
      }
  } else {
    for (int i = 0; i < ny; ++i)
      for (int j = 0; j < nx; ++j)
        pixels(i, j) = std::stod(next_token()) / maxval;
  }
  Image img;
  img.pixels = std::move(pixels);
  img.range_min = 0.0;
  img.range_max = 1.0;
  return img;
}

Image load_delimited(std::ifstream& in, const std::string& path) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw parse_error("non-numeric cell '" + tok + "' in " + path, line_no);
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw parse_error("ragged row in " + path, line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error("empty image file: " + path, 0);
  Eigen::MatrixXd pixels(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      pixels(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return make_image(std::move(pixels));
}

}  // namespace

Image load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open image file: " + path, 0);
  const int c0 = in.peek();
  if (c0 == 'P') return load_pgm(in, path);
  return load_delimited(in, path);
}

SsimConstants SsimConstants::from_range(double range) {
  if (!(range > 0.0))
    throw invalid_argument_error("SsimConstants: range must be > 0");
  SsimConstants k;
  k.c1 = 0.01 * range * 0.01 * range;
  k.c2 = 0.03 * range * 0.03 * range;
  k.c3 = k.c2 / 2.0;
  return k;
}

namespace {

struct PixelMoments {
  double mean_a, mean_b, var_a, var_b, cov;
};

PixelMoments pixel_moments(const Image& a, const Image& b) {
  const Eigen::Index n = a.pixels.size();
  const double ma = a.pixels.mean();
  const double mb = b.pixels.mean();
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (Eigen::Index i = 0; i < a.pixels.rows(); ++i)
    for (Eigen::Index j = 0; j < a.pixels.cols(); ++j) {
      const double da = a.pixels(i, j) - ma;
      const double db = b.pixels(i, j) - mb;
      saa += da * da;
      sbb += db * db;
      sab += da * db;
    }
  const double div = static_cast<double>(n - 1);
  return {ma, mb, saa / div, sbb / div, sab / div};
}

}  // namespace

SsimResult ssim(const Image& a, const Image& b, const SsimConstants& k) {
  if (a.width() != b.width() || a.height() != b.height())
    throw invalid_argument_error("ssim: image dimensions differ");
  if (!(k.c1 > 0.0 && k.c2 > 0.0 && k.c3 > 0.0))
    throw invalid_argument_error("ssim: constants must be positive");

  const PixelMoments m = pixel_moments(a, b);
  const double sa = std::sqrt(m.var_a);
  const double sb = std::sqrt(m.var_b);

  SsimResult r;
  r.luminance = (2.0 * m.mean_a * m.mean_b + k.c1) /
                (m.mean_a * m.mean_a + m.mean_b * m.mean_b + k.c1);
  r.contrast = (2.0 * sa * sb + k.c2) / (m.var_a + m.var_b + k.c2);
  r.structure = (m.cov + k.c3) / (sa * sb + k.c3);
  r.value = std::pow(r.luminance, k.alpha) * std::pow(r.contrast, k.beta) *
            std::pow(r.structure, k.gamma);
  return r;
}

SsimResult ssim(const Image& a, const Image& b) {
  const double lo = std::min(a.pixels.minCoeff(), b.pixels.minCoeff());
  const double hi = std::max(a.pixels.maxCoeff(), b.pixels.maxCoeff());
  const double range = hi > lo ? hi - lo : 1.0;
  return ssim(a, b, SsimConstants::from_range(range));
}

Contamination contaminate(const Image& img, double delta, double sigma2,
                          double tau2, ContaminationMode mode, Rng& rng) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw invalid_argument_error("contaminate: delta must lie in [0,1]");
  if (!(sigma2 > 0.0))
    throw invalid_argument_error("contaminate: sigma2 must be > 0");
  if (!(tau2 > sigma2))
    throw invalid_argument_error(
        "contaminate: tau2 must exceed sigma2 (heavy corruption premise)");

  const Eigen::Index ny = img.height();
  const Eigen::Index nx = img.width();
  const double mean = img.pixels.mean();
  const double img_var = (img.pixels.array() - mean).square().mean();
  const double noise_sd = std::sqrt(tau2 / sigma2 * img_var);

  Contamination out;
  out.image = img;
  out.mask.assign(static_cast<std::size_t>(ny * nx), 0);
  for (Eigen::Index i = 0; i < ny; ++i)
    for (Eigen::Index j = 0; j < nx; ++j) {
      if (rng.uniform01() >= delta) continue;
      out.mask[static_cast<std::size_t>(i * nx + j)] = 1;
      ++out.corrupted;
      if (mode == ContaminationMode::additive)
        out.image.pixels(i, j) += noise_sd * rng.normal();
      else
        out.image.pixels(i, j) = mean + noise_sd * rng.normal();
    }
  out.image.range_min = out.image.pixels.minCoeff();
  out.image.range_max = out.image.pixels.maxCoeff();
  return out;
}

ImageAgreementReport agreement_report(const Image& a, const Image& b,
                                      const std::vector<double>& c_grid) {
  if (a.width() != b.width() || a.height() != b.height())
    throw invalid_argument_error("agreement_report: image dimensions differ");

  const PairedSample pixels(a.vectorized(), b.vectorized());
  const SampleMoments m = summarize(pixels, DivisorMode::unbiased);

  ImageAgreementReport rep;
  rep.pearson = pearson(m);
  rep.ccc = lin_ccc(m);
  rep.ssim = ssim(a, b);
  rep.pa = pa_curve(fit_bivariate_normal(pixels).params, c_grid, "image-ml-fit");
  rep.loa = bland_altman(pixels);
  return rep;
}

std::vector<ContaminationStudyRow> contamination_study(
    const Image& original, const std::vector<double>& deltas, int seeds,
    ContaminationMode mode, const std::vector<double>& c_grid, Rng& rng) {
  if (seeds < 1)
    throw invalid_argument_error("contamination_study: need >= 1 seed");

  Image native = original;  // 8-bit display scale for the CCC comparison
  native.pixels *= 255.0;
  native.range_min *= 255.0;
  native.range_max *= 255.0;
  const std::vector<double> native_vec = native.vectorized();
  const std::vector<double> original_vec = original.vectorized();

  std::vector<ContaminationStudyRow> rows;
  std::uint64_t stream = 0;
  for (double delta : deltas) {
    ContaminationStudyRow row;
    row.delta = delta;
    row.pa.c_grid = c_grid;
    row.pa.values.assign(c_grid.size(), 0.0);
    row.pa.provenance = "seed-average";
    for (int s = 0; s < seeds; ++s) {
      Rng task = rng.derive(stream++);
      const Contamination c =
          contaminate(original, delta, 1.0, 10.0, mode, task);
      const std::vector<double> cont_vec = c.image.vectorized();

      const SampleMoments mw = summarize(PairedSample(original_vec, cont_vec),
                                         DivisorMode::unbiased);
      row.pearson += pearson(mw);
      row.ssim += ssim(original, c.image).value;
      const SampleMoments mn = summarize(PairedSample(native_vec, cont_vec),
                                         DivisorMode::unbiased);
      row.ccc += lin_ccc(mn);

      const PaCurve pa = pa_curve(
          fit_bivariate_normal(PairedSample(original_vec, cont_vec)).params,
          c_grid, "image-ml-fit");
      for (std::size_t k = 0; k < c_grid.size(); ++k)
        row.pa.values[k] += pa.values[k];
    }
    const double inv = 1.0 / static_cast<double>(seeds);
    row.pearson *= inv;
    row.ccc *= inv;
    row.ssim *= inv;
    for (double& v : row.pa.values) v *= inv;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace concord
