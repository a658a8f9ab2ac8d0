#include "gausslim/io.hpp"

#include <openssl/evp.h>

#include <Eigen/Core>
#include <boost/version.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

#include "gausslim/detail/format.hpp"
#include "gausslim/errors.hpp"

namespace gausslim::io {

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::Io, "sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(Errc::ConfigInvalid, "matrix must be a nonempty array of rows");
  const std::size_t r = j.size();
  const std::size_t c = j[0].is_array() ? j[0].size() : 0;
  if (c == 0) throw Error(Errc::ConfigInvalid, "matrix rows must be nonempty arrays");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < r; ++i) {
    if (!j[i].is_array() || j[i].size() != c) throw Error(Errc::ConfigInvalid, "matrix rows differ in length");
    for (std::size_t k = 0; k < c; ++k) {
      if (!j[i][k].is_number()) throw Error(Errc::ConfigInvalid, "matrix entries must be numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
  }
  return m;
}

Json to_json(const RVDiagnosis& d) {
  Json ratios = Json::array();
  for (const auto& p : d.ratio_curve) ratios.push_back({{"scale", p.scale}, {"ratio", p.ratio}});
  return {{"index_estimate", d.index_estimate},
          {"index_stderr", d.index_stderr},
          {"is_slowly_varying", d.is_slowly_varying},
          {"ratio_curve", ratios}};
}

Json to_json(const MRVReport& r) {
  Json j{{"limit_point", std::string(to_string(r.limit))},
         {"is_mrv0", r.is_mrv0},
         {"b_hat", matrix_json(r.b_hat)},
         {"trace_diagnosis", to_json(r.trace_diagnosis)},
         {"matrix_residual", r.matrix_residual},
         {"rank", r.rank},
         {"points_used", r.points_used},
         {"warnings", r.warnings}};
  j["k_convention"] = r.k_convention ? Json(*r.k_convention) : Json(nullptr);
  j["target_distance"] = r.target_distance ? Json(*r.target_distance) : Json(nullptr);
  return j;
}

Json to_json(const GofReport& r) {
  return {{"n", r.n},
          {"rank", r.rank},
          {"mean_norm", r.mean_norm},
          {"cov_frobenius_rel", r.cov_frobenius_rel},
          {"kernel_leak", r.kernel_leak},
          {"energy_statistic", r.energy_statistic},
          {"energy_pvalue", r.energy_pvalue},
          {"pass", r.pass},
          {"variance_ratio", r.variance_ratio},
          {"robust_scale_rel", r.robust_scale_rel}};
}

Json build_info() {
  std::ostringstream eigen, boost;
  eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  boost << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << '.' << BOOST_VERSION % 100;
  return {{"gausslim", std::string(kVersion)},
          {"compiler", std::string(__VERSION__)},
          {"eigen", eigen.str()},
          {"boost", boost.str()},
          {"config_dialect", std::string(kConfigDialect)}};
}

void write_file(const std::filesystem::path& p, std::string_view content) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error(Errc::Io, "cannot open " + p.string() + " for writing");
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw Error(Errc::Io, "write to " + p.string() + " failed");
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Error(Errc::Io, "cannot open " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string gof_summary_header() {
  return "scenario,abscissa,n,rank,mean_norm,cov_frobenius_rel,kernel_leak,energy_statistic,energy_pvalue,"
         "variance_ratio,robust_scale_rel,pass\n";
}

std::string gof_summary_row(std::string_view scenario, double abscissa, const GofReport& r) {
  using detail::num;
  std::ostringstream os;
  os << scenario << ',' << num(abscissa) << ',' << r.n << ',' << r.rank << ',' << num(r.mean_norm) << ','
     << num(r.cov_frobenius_rel) << ',' << num(r.kernel_leak) << ',' << num(r.energy_statistic) << ','
     << num(r.energy_pvalue) << ',' << num(r.variance_ratio) << ',' << num(r.robust_scale_rel) << ','
     << (r.pass ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace gausslim::io
