#include "cgf/harness/frame_file.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cgf {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) parse_error("unknown field '" + key + "' in " + where);
  }
}

Scalar scalar_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    parse_error(what + ": expected [re, im]");
  }
  const double re = j[0].get<double>();
  const double im = j[1].get<double>();
  if (!std::isfinite(re) || !std::isfinite(im)) parse_error(what + ": non-finite entry");
  return {re, im};
}

json scalar_to_json(const Scalar& z) { return json::array({z.real(), z.imag()}); }

const json& require_key(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) parse_error("missing field '" + std::string(key) + "' in " + where);
  return *it;
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) parse_error(what + ": expected a non-empty array of rows");
  const auto rows = static_cast<Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) parse_error(what + ": rows must be non-empty arrays");
  const auto cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      parse_error(what + ": ragged row " + std::to_string(r));
    }
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = scalar_from_json(row[static_cast<std::size_t>(c)],
                                 what + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

json to_json(const FrameFile& file) {
  json j;
  j["format_version"] = file.format_version;
  j["field"] = "complex";
  j["n"] = file.frame.ambient_dim();
  json blocks = json::array();
  for (const auto& b : file.frame.blocks()) {
    blocks.push_back({{"rows", b.rows()}, {"entries", matrix_to_json(b)}});
  }
  j["blocks"] = std::move(blocks);
  if (file.t || file.u) {
    json ctl = json::object();
    if (file.t) ctl["T"] = matrix_to_json(*file.t);
    if (file.u) ctl["U"] = matrix_to_json(*file.u);
    j["controllers"] = std::move(ctl);
  }
  return j;
}

FrameFile frame_file_from_json(const json& j) {
  if (!j.is_object()) parse_error("frame file must be a JSON object");
  reject_unknown_keys(j, {"format_version", "field", "n", "blocks", "controllers"}, "frame file");

  const json& version = require_key(j, "format_version", "frame file");
  if (!version.is_number_integer()) parse_error("format_version must be an integer");
  if (version.get<int>() != kFrameFormatVersion) {
    throw Error(ErrorCode::VersionMismatch,
                "format_version " + version.dump() + ", expected " +
                    std::to_string(kFrameFormatVersion));
  }
  const json& field = require_key(j, "field", "frame file");
  if (!field.is_string() || field.get<std::string>() != "complex") {
    parse_error("field must be \"complex\"");
  }
  const json& nj = require_key(j, "n", "frame file");
  if (!nj.is_number_integer() || nj.get<long long>() < 1) parse_error("n must be a positive integer");
  const auto n = static_cast<Index>(nj.get<long long>());

  const json& bj = require_key(j, "blocks", "frame file");
  if (!bj.is_array() || bj.empty()) parse_error("blocks must be a non-empty array");
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < bj.size(); ++i) {
    const std::string where = "block " + std::to_string(i);
    const json& b = bj[i];
    if (!b.is_object()) parse_error(where + " must be an object");
    reject_unknown_keys(b, {"rows", "entries"}, where);
    const json& rows = require_key(b, "rows", where);
    if (!rows.is_number_integer()) parse_error(where + ": rows must be an integer");
    Matrix m = matrix_from_json(require_key(b, "entries", where), where);
    if (m.rows() != rows.get<long long>()) parse_error(where + ": rows does not match entries");
    if (m.cols() != n) {
      throw Error(ErrorCode::ShapeError, where + " has " + std::to_string(m.cols()) +
                                             " columns, expected " + std::to_string(n));
    }
    blocks.push_back(std::move(m));
  }

  FrameFile file{GFrame(n, std::move(blocks)), std::nullopt, std::nullopt, kFrameFormatVersion};
  if (auto it = j.find("controllers"); it != j.end()) {
    if (!it->is_object()) parse_error("controllers must be an object");
    reject_unknown_keys(*it, {"T", "U"}, "controllers");
    for (const char* key : {"T", "U"}) {
      auto c = it->find(key);
      if (c == it->end()) continue;
      Matrix m = matrix_from_json(*c, std::string("controller ") + key);
      if (m.rows() != n || m.cols() != n) {
        throw Error(ErrorCode::ShapeError, std::string("controller ") + key + " must be n x n");
      }
      (key[0] == 'T' ? file.t : file.u) = std::move(m);
    }
  }
  return file;
}

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for " + path.string());
}

void save_frame(const std::filesystem::path& path, const FrameFile& file) {
  write_text_file(path, to_json(file).dump(2) + "\n");
}

FrameFile load_frame(const std::filesystem::path& path) {
  return frame_file_from_json(parse_json_file(path));
}

void save_signal(const std::filesystem::path& path, const Vector& v) {
  json entries = json::array();
  for (Index i = 0; i < v.size(); ++i) entries.push_back(scalar_to_json(v(i)));
  json j{{"format_version", kFrameFormatVersion}, {"vector", std::move(entries)}};
  write_text_file(path, j.dump(2) + "\n");
}

Vector load_signal(const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  if (!j.is_object()) parse_error("signal file must be a JSON object");
  reject_unknown_keys(j, {"format_version", "vector"}, "signal file");
  const json& version = require_key(j, "format_version", "signal file");
  if (!version.is_number_integer() || version.get<int>() != kFrameFormatVersion) {
    throw Error(ErrorCode::VersionMismatch, "signal format_version " + version.dump());
  }
  const json& vj = require_key(j, "vector", "signal file");
  if (!vj.is_array() || vj.empty()) parse_error("vector must be a non-empty array");
  Vector v(static_cast<Index>(vj.size()));
  for (std::size_t i = 0; i < vj.size(); ++i) {
    v(static_cast<Index>(i)) = scalar_from_json(vj[i], "vector[" + std::to_string(i) + "]");
  }
  return v;
}

}  // namespace cgf
