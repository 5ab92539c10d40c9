#pragma once

// Field files.
//
// Analytic fields are one JSON document listing their Fourier modes. Lattice
// fields are a JSON header next to a flat binary payload of complex128
// values, little-endian: sites in row-major order (axis 0 slowest), the d
// components of a site contiguous (mu fastest), each N x N matrix row-major,
// each entry as (re, im). See README.md for the header keys.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "levyflow/field.hpp"

namespace levyflow {

nlohmann::json analytic_to_json(const AnalyticField& field);
/// Throws ConfigError on malformed input or coefficients outside su(N).
AnalyticField analytic_from_json(const nlohmann::json& doc);

/// The binary payload alone, in the documented layout.
std::string lattice_payload(const LatticeField& field);
LatticeField lattice_from_payload(const Torus& torus, int rank, int resolution,
                                  const std::string& payload);

/// Writes <stem>.json (header) and <stem>.bin (payload). Returns the header
/// path.
std::filesystem::path save_lattice(const LatticeField& field, const std::filesystem::path& stem);
LatticeField load_lattice(const std::filesystem::path& header);

/// Writes an analytic field to <stem>.json or a lattice field as above.
std::filesystem::path save_field(const GaugeField& field, const std::filesystem::path& stem);
/// Reads either kind, dispatching on the header's "format" key.
GaugeField load_field(const std::filesystem::path& header);

}  // namespace levyflow
