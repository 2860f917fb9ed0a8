/******************************************************************************
 * Copyright 2026 The Platoon Tuner Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

/**
 * @file format.hpp
 * @brief Number formatting, JSON emission and atomic file output.
 *
 * JSON floats carry 17 significant digits so certificates re-verify on the
 * exact same bits; CSV cells carry 9.
 */
#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <system_error>

#include <unistd.h>

#include "json.hpp"
#include "platoon/errors.hpp"

namespace platoon::io {

using Json = nlohmann::ordered_json;

inline std::string format_significant(double x, int digits) {
  if (std::isnan(x)) {
    return "nan";
  }
  if (std::isinf(x)) {
    return x > 0 ? "inf" : "-inf";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return buf;
}

inline std::string csv_number(double x) { return format_significant(x, 9); }

namespace detail {

inline void dump_json(const Json& j, std::string& out, int indent, int depth) {
  const auto newline = [&](int d) {
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ',';
        }
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += ": ";
        dump_json(it.value(), out, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) {
          out += ',';
        }
        first = false;
        newline(depth + 1);
        dump_json(v, out, indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      // JSON has no NaN or infinity.
      out += std::isfinite(x) ? format_significant(x, 17) : "null";
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

/// Pretty JSON with 17-significant-digit floats and a trailing newline.
inline std::string dump_json(const Json& j) {
  std::string out;
  detail::dump_json(j, out, 2, 0);
  out += '\n';
  return out;
}

/// Write to a sibling temporary and rename over the target, so a failed run
/// never leaves a partial file behind.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) {
      throw InputError("cannot open '" + tmp.string() + "' for writing");
    }
    f << content;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw InputError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InputError("cannot move output into place at '" + path + "'");
  }
}

/// Empty path means standard output.
inline void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    std::cout.flush();
  } else {
    write_file_atomic(path, content);
  }
}

}  // namespace platoon::io
