// SPDX-License-Identifier: Apache-2.0
//
// The writers always emit little-endian; on the (x86/aarch64) targets we
// support that is the native order, so reads/writes are plain memcpy.

#include <cstdint>
#include <cstring>
#include <fstream>

#include "modcalc/core/field.hpp"

namespace modcalc {

namespace {

constexpr uint32_t kVersion = 1;

void put_bytes(std::ostream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
void put(std::ostream& os, T v) {
  put_bytes(os, &v, sizeof(T));
}

void get_bytes(std::istream& is, void* p, size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!is) throw FormatError("unexpected end of field file");
}

template <typename T>
T get(std::istream& is) {
  T v;
  get_bytes(is, &v, sizeof(T));
  return v;
}

void put_tag(std::ostream& os, const char* tag) { put_bytes(os, tag, 4); }

std::string get_tag(std::istream& is) {
  char tag[4];
  get_bytes(is, tag, 4);
  return std::string(tag, 4);
}

}  // namespace

void save_field(const SampledField& f, const std::string& path,
                const MetadataBlocks& meta) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open for writing: " + path);
  const UniformGrid& g = f.grid();
  const uint32_t d = static_cast<uint32_t>(g.dim());
  put_tag(os, "MODC");
  put<uint32_t>(os, kVersion);
  put<uint32_t>(os, d);
  for (Index n : g.counts) put<uint64_t>(os, static_cast<uint64_t>(n));
  for (uint32_t k = 0; k < d; ++k) put<double>(os, g.steps[k]);
  for (uint32_t k = 0; k < d; ++k) put<double>(os, g.offsets[k]);
  for (uint32_t r = 0; r < d; ++r)
    for (uint32_t c = 0; c < d; ++c) put<double>(os, g.basis.matrix()(r, c));
  for (const auto& [tag, body] : meta) {
    if (tag.size() != 4) throw FormatError("metadata tag must be 4 bytes");
    const std::string text = body.dump();
    put_tag(os, tag.c_str());
    put<uint64_t>(os, text.size());
    put_bytes(os, text.data(), text.size());
  }
  put_tag(os, "DATA");
  put<uint64_t>(os, static_cast<uint64_t>(f.size()));
  for (Index i = 0; i < f.size(); ++i) {
    put<double>(os, f(i).real());
    put<double>(os, f(i).imag());
  }
  if (!os) throw FormatError("write failed: " + path);
}

SampledField load_field(const std::string& path, MetadataBlocks* meta) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open for reading: " + path);
  if (get_tag(is) != "MODC") throw FormatError("bad magic in " + path);
  const uint32_t version = get<uint32_t>(is);
  if (version != kVersion) {
    throw FormatError("unsupported field file version in " + path);
  }
  const uint32_t d = get<uint32_t>(is);
  if (d == 0 || d > 16) throw FormatError("implausible dimension in " + path);
  std::vector<Index> counts(d);
  for (auto& n : counts) n = static_cast<Index>(get<uint64_t>(is));
  Eigen::ArrayXd steps(d), offsets(d);
  for (uint32_t k = 0; k < d; ++k) steps[k] = get<double>(is);
  for (uint32_t k = 0; k < d; ++k) offsets[k] = get<double>(is);
  Eigen::MatrixXd basis(d, d);
  for (uint32_t r = 0; r < d; ++r)
    for (uint32_t c = 0; c < d; ++c) basis(r, c) = get<double>(is);

  std::string tag = get_tag(is);
  while (tag != "DATA") {
    const uint64_t len = get<uint64_t>(is);
    std::string text(len, '\0');
    get_bytes(is, text.data(), len);
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception&) {
      throw FormatError("malformed metadata block '" + tag + "' in " + path);
    }
    if (meta) (*meta)[tag] = std::move(body);
    tag = get_tag(is);
  }
  const uint64_t count = get<uint64_t>(is);
  UniformGrid grid(OrderedBasis(basis), counts, steps, offsets);
  if (static_cast<Index>(count) != grid.size()) {
    throw FormatError("value count does not match grid in " + path);
  }
  Eigen::ArrayXcd values(static_cast<Index>(count));
  for (uint64_t i = 0; i < count; ++i) {
    const double re = get<double>(is);
    const double im = get<double>(is);
    values[static_cast<Index>(i)] = Complex(re, im);
  }
  return SampledField(std::move(grid), std::move(values));
}

nlohmann::json field_to_json(const SampledField& f, const MetadataBlocks& meta) {
  const UniformGrid& g = f.grid();
  const int d = g.dim();
  nlohmann::json j;
  j["magic"] = "MODC";
  j["version"] = kVersion;
  j["dim"] = d;
  j["counts"] = g.counts;
  j["steps"] = std::vector<double>(g.steps.data(), g.steps.data() + d);
  j["offsets"] = std::vector<double>(g.offsets.data(), g.offsets.data() + d);
  auto& rows = j["basis"] = nlohmann::json::array();
  for (int r = 0; r < d; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < d; ++c) row.push_back(g.basis.matrix()(r, c));
    rows.push_back(std::move(row));
  }
  if (!meta.empty()) {
    for (const auto& [tag, body] : meta) j["meta"][tag] = body;
  }
  auto& vals = j["values"] = nlohmann::json::array();
  for (Index i = 0; i < f.size(); ++i) {
    vals.push_back({f(i).real(), f(i).imag()});
  }
  return j;
}

SampledField field_from_json(const nlohmann::json& j, MetadataBlocks* meta) {
  try {
    if (j.at("magic").get<std::string>() != "MODC") {
      throw FormatError("bad magic in JSON field");
    }
    const int d = j.at("dim").get<int>();
    std::vector<Index> counts = j.at("counts").get<std::vector<Index>>();
    auto steps_v = j.at("steps").get<std::vector<double>>();
    auto offsets_v = j.at("offsets").get<std::vector<double>>();
    Eigen::ArrayXd steps =
        Eigen::Map<const Eigen::ArrayXd>(steps_v.data(), d);
    Eigen::ArrayXd offsets =
        Eigen::Map<const Eigen::ArrayXd>(offsets_v.data(), d);
    Eigen::MatrixXd basis(d, d);
    const auto& rows = j.at("basis");
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) basis(r, c) = rows.at(r).at(c).get<double>();
    if (meta && j.contains("meta")) {
      for (const auto& [tag, body] : j.at("meta").items()) (*meta)[tag] = body;
    }
    const auto& vals = j.at("values");
    Eigen::ArrayXcd values(static_cast<Index>(vals.size()));
    for (Index i = 0; i < values.size(); ++i) {
      values[i] = Complex(vals.at(i).at(0).get<double>(),
                          vals.at(i).at(1).get<double>());
    }
    return SampledField(UniformGrid(OrderedBasis(basis), counts, steps, offsets),
                        std::move(values));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed JSON field: ") + e.what());
  }
}

void save_field_json(const SampledField& f, const std::string& path,
                     const MetadataBlocks& meta) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open for writing: " + path);
  os << field_to_json(f, meta).dump(2) << "\n";
}

SampledField load_field_json(const std::string& path, MetadataBlocks* meta) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open for reading: " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed JSON in ") + path + ": " +
                      e.what());
  }
  return field_from_json(j, meta);
}

}  // namespace modcalc
