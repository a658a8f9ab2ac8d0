#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

#include "gausslim/gof.hpp"
#include "gausslim/moment_matrix.hpp"
#include "gausslim/normalize.hpp"
#include "gausslim/regvar.hpp"

namespace gausslim::io {

using Json = nlohmann::json;

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kConfigDialect = "JSON (RFC 8259), schema gausslim-config/1";

std::string sha256_hex(std::string_view data);

Json matrix_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j);

Json to_json(const RVDiagnosis& d);
Json to_json(const MRVReport& r);
Json to_json(const GofReport& r);

/// Library, compiler and dependency versions recorded in manifests.
Json build_info();

void write_file(const std::filesystem::path& p, std::string_view content);
std::string read_file(const std::filesystem::path& p);

/// Header and one row of the GOF summary table.
std::string gof_summary_header();
std::string gof_summary_row(std::string_view scenario, double abscissa, const GofReport& r);

}  // namespace gausslim::io
