// SPDX-License-Identifier: Apache-2.0
//
// Channel ingestion files: a JSON document with fields d_in, d_out, param,
// param_value, noise_value, and kraus / dkraus as nested arrays of [re, im]
// pairs in row-major order. Doubles round-trip bit-exactly.
#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "qmetro/channel.hpp"

namespace qmetro {

inline nlohmann::json channel_to_json(const ParamChannel& ch) {
  nlohmann::json j;
  j["d_in"] = ch.d_in;
  j["d_out"] = ch.d_out;
  j["param"] = to_string(ch.param);
  j["param_value"] = ch.param_value;
  j["noise_value"] = ch.noise_value;
  if (ch.kind) j["kind"] = to_string(*ch.kind);
  auto put_list = [&](const std::vector<CMatrix>& ms) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& m : ms) {
      nlohmann::json rows = nlohmann::json::array();
      for (Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Index j2 = 0; j2 < m.cols(); ++j2)
          row.push_back({m(i, j2).real(), m(i, j2).imag()});
        rows.push_back(row);
      }
      list.push_back(rows);
    }
    return list;
  };
  j["kraus"] = put_list(ch.kraus);
  j["dkraus"] = put_list(ch.dkraus);
  return j;
}

inline ParamChannel channel_from_json(const nlohmann::json& j) {
  ParamChannel ch;
  try {
    ch.d_in = j.at("d_in").get<Index>();
    ch.d_out = j.at("d_out").get<Index>();
    ch.param = param_kind_from_string(j.at("param").get<std::string>());
    ch.param_value = j.value("param_value", 0.0);
    ch.noise_value = j.value("noise_value", 1.0);
    if (j.contains("kind")) ch.kind = noise_kind_from_string(j.at("kind").get<std::string>());
    auto get_list = [&](const nlohmann::json& list) {
      std::vector<CMatrix> ms;
      for (const auto& rows : list) {
        CMatrix m(ch.d_out, ch.d_in);
        if (static_cast<Index>(rows.size()) != ch.d_out)
          fail(errc::parse_error, "channel file: operator row count mismatch");
        for (Index i = 0; i < ch.d_out; ++i) {
          if (static_cast<Index>(rows[i].size()) != ch.d_in)
            fail(errc::parse_error, "channel file: operator column count mismatch");
          for (Index c = 0; c < ch.d_in; ++c)
            m(i, c) = Complex(rows[i][c][0].get<double>(), rows[i][c][1].get<double>());
        }
        ms.push_back(m);
      }
      return ms;
    };
    ch.kraus = get_list(j.at("kraus"));
    ch.dkraus = get_list(j.at("dkraus"));
  } catch (const nlohmann::json::exception& e) {
    fail(errc::parse_error, std::string("channel file: ") + e.what());
  }
  return ch;
}

/// Load and validate a channel file; representations with linearly dependent
/// Kraus operators are compressed by dropping null Gram directions.
inline ParamChannel load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::parse_error, "cannot open channel file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::parse_error, std::string("channel file: ") + e.what());
  }
  ParamChannel ch = channel_from_json(j);
  auto bad = validate(ch);
  for (const auto& msg : bad) {
    if (msg == "Kraus operators are not linearly independent") {
      ch = compress(ch);
      bad = validate(ch);
      break;
    }
  }
  if (!bad.empty()) fail(errc::parse_error, "channel file: " + bad.front());
  return ch;
}

inline void save_channel(const ParamChannel& ch, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::parse_error, "cannot write channel file '" + path + "'");
  out << channel_to_json(ch).dump(2) << "\n";
}

}  // namespace qmetro
