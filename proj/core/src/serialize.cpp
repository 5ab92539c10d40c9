#include "levyflow/serialize.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "levyflow/errors.hpp"

namespace levyflow {

namespace {

constexpr const char* kAnalyticFormat = "levyflow-analytic";
constexpr const char* kLatticeFormat = "levyflow-lattice";
constexpr int kVersion = 1;

using nlohmann::json;

void put_le(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffU));
}

double get_le(const char* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[b])) << (8 * b);
  }
  return std::bit_cast<double>(bits);
}

template <typename T>
T require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ConfigError(std::string("field file: missing key '") + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field file: bad value for '") + key + "': " + e.what());
  }
}

Torus torus_from(const json& doc) {
  try {
    return {require<int>(doc, "dim"), require<double>(doc, "length")};
  } catch (const DomainError& e) {
    throw ConfigError(std::string("field file: ") + e.what());
  }
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, int rank) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != rank) {
    throw ConfigError("field file: coefficient must have " + std::to_string(rank) + " rows");
  }
  Matrix m(rank, rank);
  for (int i = 0; i < rank; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != rank) {
      throw ConfigError("field file: coefficient row has wrong length");
    }
    for (int j = 0; j < rank; ++j) {
      const json& e = row[static_cast<std::size_t>(j)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw ConfigError("field file: entries must be [re, im] pairs");
      }
      m(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* ext) {
  return std::filesystem::path(stem.string() + ext);
}

}  // namespace

json analytic_to_json(const AnalyticField& field) {
  json modes = json::array();
  for (const auto& m : field.modes()) {
    modes.push_back({{"k", json(std::vector<int>(m.k.begin(), m.k.begin() + field.torus().dim()))},
                     {"mu", m.mu},
                     {"phase", m.phase == Phase::Cos ? "cos" : "sin"},
                     {"coeff", matrix_to_json(m.coeff.matrix())}});
  }
  return {{"format", kAnalyticFormat},
          {"version", kVersion},
          {"dim", field.torus().dim()},
          {"length", field.torus().length()},
          {"rank", field.rank()},
          {"modes", modes}};
}

AnalyticField analytic_from_json(const json& doc) {
  if (require<std::string>(doc, "format") != kAnalyticFormat) {
    throw ConfigError("field file: not an analytic field");
  }
  if (require<int>(doc, "version") != kVersion) throw ConfigError("field file: unknown version");
  const Torus torus = torus_from(doc);
  const int rank = require<int>(doc, "rank");
  if (rank < 1 || rank > kMaxRank) throw ConfigError("field file: rank out of range");
  const json modes = require<json>(doc, "modes");
  if (!modes.is_array()) throw ConfigError("field file: 'modes' must be an array");
  std::vector<FourierMode> out;
  for (const json& m : modes) {
    FourierMode mode;
    const auto k = require<std::vector<int>>(m, "k");
    if (static_cast<int>(k.size()) != torus.dim()) {
      throw ConfigError("field file: wave vector has wrong length");
    }
    std::copy(k.begin(), k.end(), mode.k.begin());
    mode.mu = require<int>(m, "mu");
    const auto phase = require<std::string>(m, "phase");
    if (phase != "cos" && phase != "sin") throw ConfigError("field file: phase must be cos/sin");
    mode.phase = phase == "cos" ? Phase::Cos : Phase::Sin;
    try {
      mode.coeff = LieElem::from_matrix(matrix_from_json(require<json>(m, "coeff"), rank));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("field file: ") + e.what());
    }
    out.push_back(std::move(mode));
  }
  try {
    return {torus, rank, std::move(out)};
  } catch (const DomainError& e) {
    throw ConfigError(std::string("field file: ") + e.what());
  }
}

std::string lattice_payload(const LatticeField& field) {
  std::string out;
  const int n = field.rank();
  out.reserve(field.values().size() * static_cast<std::size_t>(n * n) * 16);
  for (const auto& v : field.values()) {
    const Matrix& m = v.matrix();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        put_le(out, m(i, j).real());
        put_le(out, m(i, j).imag());
      }
    }
  }
  return out;
}

LatticeField lattice_from_payload(const Torus& torus, int rank, int resolution,
                                  const std::string& payload) {
  std::size_t sites = 1;
  for (int a = 0; a < torus.dim(); ++a) sites *= static_cast<std::size_t>(resolution);
  const std::size_t count = sites * static_cast<std::size_t>(torus.dim());
  const std::size_t bytes = count * static_cast<std::size_t>(rank * rank) * 16;
  if (payload.size() != bytes) {
    throw ConfigError("lattice payload: expected " + std::to_string(bytes) + " bytes, got " +
                      std::to_string(payload.size()));
  }
  std::vector<LieElem> values;
  values.reserve(count);
  const char* p = payload.data();
  for (std::size_t c = 0; c < count; ++c) {
    Matrix m(rank, rank);
    for (int i = 0; i < rank; ++i) {
      for (int j = 0; j < rank; ++j) {
        m(i, j) = Complex(get_le(p), get_le(p + 8));
        p += 16;
      }
    }
    try {
      values.push_back(LieElem::from_matrix(m));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("lattice payload: ") + e.what());
    }
  }
  try {
    return {torus, rank, resolution, std::move(values)};
  } catch (const DomainError& e) {
    throw ConfigError(std::string("lattice payload: ") + e.what());
  }
}

std::filesystem::path save_lattice(const LatticeField& field, const std::filesystem::path& stem) {
  const auto header = with_suffix(stem, ".json");
  const auto data = with_suffix(stem, ".bin");
  const json doc = {{"format", kLatticeFormat},
                    {"version", kVersion},
                    {"dim", field.torus().dim()},
                    {"length", field.torus().length()},
                    {"rank", field.rank()},
                    {"resolution", field.resolution()},
                    {"dtype", "complex128-le"},
                    {"layout", "sites row-major (axis 0 slowest), mu fastest, matrix row-major"},
                    {"data", data.filename().string()}};
  write_file(data, lattice_payload(field));
  write_file(header, doc.dump(2) + "\n");
  return header;
}

LatticeField load_lattice(const std::filesystem::path& header) {
  const json doc = read_json(header);
  if (require<std::string>(doc, "format") != kLatticeFormat) {
    throw ConfigError("field file: not a lattice field");
  }
  if (require<int>(doc, "version") != kVersion) throw ConfigError("field file: unknown version");
  if (require<std::string>(doc, "dtype") != "complex128-le") {
    throw ConfigError("field file: unsupported dtype");
  }
  const Torus torus = torus_from(doc);
  const int rank = require<int>(doc, "rank");
  if (rank < 1 || rank > kMaxRank) throw ConfigError("field file: rank out of range");
  const int m = require<int>(doc, "resolution");
  const auto data = header.parent_path() / require<std::string>(doc, "data");
  return lattice_from_payload(torus, rank, m, read_file(data));
}

std::filesystem::path save_field(const GaugeField& field, const std::filesystem::path& stem) {
  if (field.is_lattice()) return save_lattice(field.lattice(), stem);
  const auto header = with_suffix(stem, ".json");
  write_file(header, analytic_to_json(field.analytic()).dump(2) + "\n");
  return header;
}

GaugeField load_field(const std::filesystem::path& header) {
  const json doc = read_json(header);
  const auto format = require<std::string>(doc, "format");
  if (format == kAnalyticFormat) return analytic_from_json(doc);
  if (format == kLatticeFormat) return load_lattice(header);
  throw ConfigError("field file: unknown format '" + format + "'");
}

}  // namespace levyflow
